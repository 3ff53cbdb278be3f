//! Edge-list CSV and DOT renderings of layers and spanning trees.

use std::fmt::Write;

use super::bands::Band;
use super::layer::LayerMatrix;
use super::mst::SpanningTree;

/// `src,dst,weight` rows for every tree edge, with entity names.
pub fn tree_edge_csv(tree: &SpanningTree) -> String {
    let mut out = String::from("src,dst,weight\n");
    for e in &tree.edges {
        let _ = writeln!(
            out,
            "{},{},{}",
            tree.entities[e.src], tree.entities[e.dst], e.weight
        );
    }
    out
}

/// Upper-triangle nonzero edges of a layer.
pub fn layer_edge_csv(layer: &LayerMatrix) -> String {
    let mut out = String::from("src,dst,weight\n");
    let w = layer.weights();
    for i in 0..w.len() {
        for j in (i + 1)..w.len() {
            if w[i][j] != 0.0 {
                let _ = writeln!(
                    out,
                    "{},{},{}",
                    layer.entities()[i],
                    layer.entities()[j],
                    w[i][j]
                );
            }
        }
    }
    out
}

fn dot_header(out: &mut String, name: &str, entities: &[String], bands: Option<&[Band]>) {
    let _ = writeln!(out, "graph \"{name}\" {{");
    for (i, e) in entities.iter().enumerate() {
        match bands {
            Some(b) => {
                let _ = writeln!(out, "  \"{e}\" [band={}];", b[i]);
            }
            None => {
                let _ = writeln!(out, "  \"{e}\";");
            }
        }
    }
}

pub fn tree_dot(tree: &SpanningTree, name: &str, bands: Option<&[Band]>) -> String {
    let mut out = String::new();
    dot_header(&mut out, name, &tree.entities, bands);
    for e in &tree.edges {
        let _ = writeln!(
            out,
            "  \"{}\" -- \"{}\" [weight={}];",
            tree.entities[e.src], tree.entities[e.dst], e.weight
        );
    }
    out.push_str("}\n");
    out
}

pub fn layer_dot(layer: &LayerMatrix, name: &str, bands: Option<&[Band]>) -> String {
    let mut out = String::new();
    dot_header(&mut out, name, layer.entities(), bands);
    let w = layer.weights();
    for i in 0..w.len() {
        for j in (i + 1)..w.len() {
            if w[i][j] != 0.0 {
                let _ = writeln!(
                    out,
                    "  \"{}\" -- \"{}\" [weight={}];",
                    layer.entities()[i],
                    layer.entities()[j],
                    w[i][j]
                );
            }
        }
    }
    out.push_str("}\n");
    out
}
