pub mod diffcheck;
pub mod translate;
