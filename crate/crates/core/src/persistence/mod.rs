//! Persistence diagrams via Z/2 boundary-matrix reduction, plus diagram
//! metrics and functionals.

mod bottleneck;
mod diagram;
mod io;
mod reduction;

pub use bottleneck::{bottleneck_distance, hopcroft_karp};
pub use diagram::{total_persistence, PersistenceDiagram, PersistencePair};
pub use io::{
    diagram_of_degree, parse_diagram_csv, read_diagram_csv, write_diagram_csv, DIAGRAM_CSV_HEADER,
};
pub use reduction::{
    compute_persistence, compute_persistence_with, Reduction, ZERO_PERSISTENCE_RTOL,
};
