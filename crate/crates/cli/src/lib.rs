pub mod parser;
pub mod report;
pub mod runner;
