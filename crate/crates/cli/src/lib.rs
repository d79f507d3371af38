//! Expression language, manifests, task execution and reports for the
//! `thetahat` command-line tool.

pub mod dsl;
pub mod manifest;
pub mod report;
pub mod tasks;
