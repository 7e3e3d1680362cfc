pub mod json;
pub mod lex;
pub mod parse;
pub mod print;
pub mod run;
