pub mod combinatorics;
pub mod error;
pub mod linalg;
pub mod poly;
pub mod sheaf;
pub mod ambient;
pub mod fixed_point;
pub mod graded;
pub mod harness;
