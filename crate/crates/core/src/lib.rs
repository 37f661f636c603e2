pub mod calculus;
pub mod catalog;
pub mod cli;
pub mod deformation;
pub mod exterior;
pub mod fuzz;
pub mod hodge;
pub mod lemmata;
pub mod linalg;
pub mod positivity;
pub mod random;
pub mod report;
pub mod scalar;
pub mod series;
