pub mod cli;
pub mod expr;
pub mod forms;
pub mod geometry;
pub mod helmholtz;
pub mod numeric;
pub mod spencer;
