pub mod corpus;
pub mod json;
pub mod suite;
pub mod svg;
