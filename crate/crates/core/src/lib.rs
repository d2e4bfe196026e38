pub mod beam;
pub mod coupling;
pub mod figures;
mod jet;
pub mod motion;
pub mod scan;
pub mod special;
