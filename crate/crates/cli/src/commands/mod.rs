pub mod microgrid;
pub mod run;
pub mod stats;
pub mod sweep;
