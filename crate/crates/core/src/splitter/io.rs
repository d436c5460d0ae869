use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{DatasetSplit, SplitManifest};
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, NodeId};

pub const TRAIN_FILE: &str = "train.tsv";
pub const VALID_FILE: &str = "valid.tsv";
pub const TEST_FILE: &str = "test.tsv";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Writes `u<TAB>v` lines in ascending `(u, v)` order.
pub fn write_edge_tsv(path: &Path, edges: &[Edge]) -> Result<()> {
    let mut sorted = edges.to_vec();
    sorted.sort_unstable();
    let mut out = BufWriter::new(File::create(path)?);
    for e in sorted {
        writeln!(out, "{}\t{}", e.u, e.v)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_edge_tsv(path: &Path) -> Result<Vec<Edge>> {
    let reader = BufReader::new(File::open(path)?);
    let mut edges = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |reason: &str| Error::Malformed {
            line: idx + 1,
            reason: format!("{}: {reason}", path.display()),
        };
        let mut fields = line.split('\t');
        let mut next = || -> Result<NodeId> {
            fields
                .next()
                .and_then(|f| f.trim().parse().ok())
                .ok_or_else(|| malformed("expected u<TAB>v"))
        };
        let (u, v) = (next()?, next()?);
        edges.push(Edge::new(u, v).map_err(|_| malformed("self-loop"))?);
    }
    Ok(edges)
}

/// Writes `train.tsv`, `valid.tsv`, `test.tsv` and `manifest.json`.
pub fn write_split(ds: &DatasetSplit, out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir)?;
    write_edge_tsv(&out_dir.join(TRAIN_FILE), &ds.train_edges)?;
    write_edge_tsv(&out_dir.join(VALID_FILE), &ds.valid_edges)?;
    write_edge_tsv(&out_dir.join(TEST_FILE), &ds.test_edges)?;
    let mut out = BufWriter::new(File::create(out_dir.join(MANIFEST_FILE))?);
    serde_json::to_writer_pretty(&mut out, &ds.manifest)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// Loads a split directory written by [`write_split`].
pub fn read_split(dir: &Path) -> Result<DatasetSplit> {
    let manifest_path = dir.join(MANIFEST_FILE);
    if !manifest_path.exists() {
        return Err(Error::MissingInput(format!("no split manifest at {}", manifest_path.display())));
    }
    let manifest: SplitManifest = serde_json::from_reader(BufReader::new(File::open(&manifest_path)?))?;
    let train_edges = read_edge_tsv(&dir.join(TRAIN_FILE))?;
    let valid_edges = read_edge_tsv(&dir.join(VALID_FILE))?;
    let test_edges = read_edge_tsv(&dir.join(TEST_FILE))?;
    let train_graph = Graph::from_edges(manifest.num_nodes, &train_edges)?;
    Ok(DatasetSplit {
        train_edges,
        valid_edges,
        test_edges,
        train_graph,
        manifest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heuristics::HeuristicKind;
    use crate::splitter::{split_graph, Direction, SplitSpec};

    fn toy_split() -> DatasetSplit {
        let pairs = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (3, 4), (4, 5), (5, 6), (6, 3)];
        let edges: Vec<Edge> = pairs.iter().map(|&(u, v)| Edge::new(u, v).unwrap()).collect();
        let g = Graph::from_edges(7, &edges).unwrap();
        let spec = SplitSpec::new(HeuristicKind::CommonNeighbors, [0.0, 1.0, 2.0], Direction::Forward, 3).unwrap();
        split_graph(&g, &spec).unwrap()
    }

    fn line_count(path: &Path) -> usize {
        fs::read_to_string(path).unwrap().lines().count()
    }

    #[test]
    fn files_match_manifest_and_round_trip() {
        let ds = toy_split();
        let dir = tempfile::tempdir().unwrap();
        write_split(&ds, dir.path()).unwrap();
        let m = &ds.manifest;
        assert_eq!(line_count(&dir.path().join(TRAIN_FILE)), m.counts.train);
        assert_eq!(line_count(&dir.path().join(VALID_FILE)), m.counts.valid);
        assert_eq!(line_count(&dir.path().join(TEST_FILE)), m.counts.test);

        let back = read_split(dir.path()).unwrap();
        assert_eq!(back.train_edges, ds.train_edges);
        assert_eq!(back.valid_edges, ds.valid_edges);
        assert_eq!(back.test_edges, ds.test_edges);
        assert_eq!(back.manifest, ds.manifest);
        assert_eq!(back.train_graph, ds.train_graph);
    }

    #[test]
    fn empty_split_writes_empty_file() {
        let mut ds = toy_split();
        ds.valid_edges.clear();
        let dir = tempfile::tempdir().unwrap();
        write_split(&ds, dir.path()).unwrap();
        assert_eq!(fs::read_to_string(dir.path().join(VALID_FILE)).unwrap(), "");
    }

    #[test]
    fn output_is_byte_identical_across_runs() {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        write_split(&toy_split(), a.path()).unwrap();
        write_split(&toy_split(), b.path()).unwrap();
        for f in [TRAIN_FILE, VALID_FILE, TEST_FILE, MANIFEST_FILE] {
            assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap());
        }
    }

    #[test]
    fn missing_directory_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(read_split(&dir.path().join("nope")), Err(Error::MissingInput(_))));
    }
}
