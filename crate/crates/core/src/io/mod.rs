//! Reading and writing graphs: a JSON document per graph, JSON-lines corpora
//! of labelled graphs, and the TU benchmark flat-file layout.

mod json;
mod tu;

pub use json::{
    graph_from_value, graph_to_value, parse_corpus, parse_graph_json, read_corpus, write_corpus,
    write_graph_json, LabeledGraph,
};
pub use tu::{parse_tu_dataset, TuDataset};
