pub mod batch;
pub mod compute;
pub mod degrade;
pub mod eval;
pub mod select;
