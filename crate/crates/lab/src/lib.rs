//! File formats, parallel sampling and the property suites of the
//! `innerlab` command line tool.

pub mod cli;
pub mod formats;
pub mod parallel;
pub mod run;
pub mod verify;
