pub mod classifier;
pub mod field;
pub mod fixtures;
pub mod group;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod rationality;
pub mod symplectic;
pub mod wagner;
