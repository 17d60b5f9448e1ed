pub mod assign;
pub mod eval;
pub mod gradcheck;
pub mod nms;
pub mod tile;
