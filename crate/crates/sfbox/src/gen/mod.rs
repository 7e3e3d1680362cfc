pub mod program;
pub mod sfgen;
