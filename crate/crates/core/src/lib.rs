pub mod cli;
pub mod doc;
pub mod formula;
pub mod hilbert;
pub mod realize;
pub mod sequent;
pub mod translate;
