pub mod bm25;
pub mod contrastive;
pub mod corpus;
pub mod dense;
pub mod eval;
pub mod porter;
pub mod rankers;
pub mod ranking;
pub mod textprep;
