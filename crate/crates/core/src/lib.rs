pub mod cf;
pub mod cli;
pub mod corpus;
pub mod document;
pub mod evalx;
pub mod fm;
pub mod fragmenter;
pub mod lstm;
pub mod pipeline;
pub mod sentiment;
pub mod sides;
