pub mod cli;
pub mod complex;
pub mod estimates;
pub mod gcomplex;
pub mod graphct;
pub mod group;
pub mod surface;
