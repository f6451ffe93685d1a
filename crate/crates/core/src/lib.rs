pub mod arcs;
pub mod error;
pub mod geometry;
pub mod measure;
pub mod density;
pub mod sequence;
pub mod simplex;
pub mod interp;
pub mod construction;
pub mod gallery;
pub mod necessity;
pub mod zero_free;
