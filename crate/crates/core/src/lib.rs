pub mod cli;
pub mod engine;
pub mod formula;
pub mod graph;
pub mod lexer;
pub mod model;
pub mod reduction;
pub mod tree;
pub mod views;
