//! File formats and rendering: `.ifs` documents, sampled-graph CSV with a
//! metadata sidecar, SVG figures and plain-text certificate reports. All of
//! them work with `f64` scalars.

pub mod csv_io;
pub mod ifs_file;
pub mod report;
pub mod svg;

pub use csv_io::{
    load_graph, read_graph_csv, read_sidecar, save_graph, sidecar_path, write_graph_csv, write_sidecar, GraphMetadata,
};
pub use ifs_file::{parse_ifs, parse_ifs_document, serialize_ifs, IfsDocument, IfsMetadata};
pub use report::{Block, CertificateReport, Status};
pub use svg::{render_svg, Overlay, Style};

/// Formats a value with 17 significant digits.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}
