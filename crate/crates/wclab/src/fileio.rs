//! Reading and writing the on-disk formats: actions, SFT specifications,
//! pattern sets, graphs (edge-list and a DOT subset), and labellings.
//!
//! A labelling file references its action by path:
//! ```text
//! action <path relative to this file>
//! colors <k>
//! map c0 c1 ... c_{n-1}
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use crate::action::FiniteAction;
use crate::error::{Result, WcError};
use crate::graph::LocalGraph;
use crate::pattern::{Labelling, PatternSet};
use crate::sft::SftSpec;

pub fn read_action(path: &Path) -> Result<FiniteAction> {
    FiniteAction::from_text(&fs::read_to_string(path)?)
}

pub fn write_action(path: &Path, a: &FiniteAction) -> Result<()> {
    fs::write(path, a.to_text())?;
    Ok(())
}

pub fn read_sft(path: &Path) -> Result<SftSpec> {
    SftSpec::from_text(&fs::read_to_string(path)?)
}

pub fn write_sft(path: &Path, x: &SftSpec) -> Result<()> {
    fs::write(path, x.to_text())?;
    Ok(())
}

pub fn read_pattern_set(path: &Path) -> Result<PatternSet> {
    PatternSet::from_text(&fs::read_to_string(path)?)
}

pub fn write_pattern_set(path: &Path, p: &PatternSet) -> Result<()> {
    fs::write(path, p.to_text())?;
    Ok(())
}

/// Graphs are stored as edge lists, except `.dot` files which use the DOT
/// subset emitted by [`LocalGraph::to_dot`].
pub fn read_graph(path: &Path) -> Result<LocalGraph> {
    let text = fs::read_to_string(path)?;
    if path.extension().map_or(false, |e| e == "dot") {
        LocalGraph::from_dot(&text)
    } else {
        LocalGraph::from_edge_list_text(&text)
    }
}

pub fn write_graph(path: &Path, g: &LocalGraph) -> Result<()> {
    fs::write(path, g.to_edge_list_text())?;
    Ok(())
}

/// Resolve `rel` against the directory containing `base_file`.
fn sibling(base_file: &Path, rel: &str) -> PathBuf {
    let rel_path = Path::new(rel);
    if rel_path.is_absolute() {
        rel_path.to_path_buf()
    } else {
        base_file
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .join(rel_path)
    }
}

pub fn read_labelling(path: &Path) -> Result<Labelling> {
    let text = fs::read_to_string(path)?;
    let mut action: Option<FiniteAction> = None;
    let mut colors: Option<usize> = None;
    let mut map: Vec<usize> = Vec::new();
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, rest) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| WcError::Parse(format!("labelling line '{line}'")))?;
        match key {
            "action" => {
                action = Some(read_action(&sibling(path, rest.trim()))?);
            }
            "colors" => {
                colors = Some(
                    rest.trim()
                        .parse()
                        .map_err(|_| WcError::Parse(format!("colors '{rest}'")))?,
                );
            }
            "map" => {
                for tok in rest.split_whitespace() {
                    map.push(
                        tok.parse()
                            .map_err(|_| WcError::Parse(format!("map entry '{tok}'")))?,
                    );
                }
            }
            other => {
                return Err(WcError::Parse(format!("unknown labelling key '{other}'")));
            }
        }
    }
    let action = action.ok_or_else(|| WcError::Parse("labelling missing 'action'".into()))?;
    let colors = colors.ok_or_else(|| WcError::Parse("labelling missing 'colors'".into()))?;
    Labelling::new(action, colors, map)
}

/// Write `f` to `path`, storing its action at `action_rel` (relative to the
/// labelling file) and referencing it from the header.
pub fn write_labelling(path: &Path, f: &Labelling, action_rel: &str) -> Result<()> {
    write_action(&sibling(path, action_rel), f.action())?;
    let mut text = String::new();
    text.push_str(&format!("action {action_rel}\n"));
    text.push_str(&format!("colors {}\n", f.num_colors()));
    let entries: Vec<String> = f.colors().iter().map(|c| c.to_string()).collect();
    text.push_str(&format!("map {}\n", entries.join(" ")));
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::make_cycle;
    use crate::graph::cycle_graph;
    use crate::sft::period_sft;

    #[test]
    fn action_roundtrip_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c5.act");
        let a = make_cycle(5).unwrap();
        write_action(&p, &a).unwrap();
        let b = read_action(&p).unwrap();
        assert_eq!(a.to_text(), b.to_text());
    }

    #[test]
    fn sft_roundtrip_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("p3.sft");
        let x = period_sft(3).unwrap();
        write_sft(&p, &x).unwrap();
        assert_eq!(read_sft(&p).unwrap().to_text(), x.to_text());
    }

    #[test]
    fn graph_roundtrip_both_formats() {
        let dir = tempfile::tempdir().unwrap();
        let g = cycle_graph(6);
        let p1 = dir.path().join("c6.graph");
        write_graph(&p1, &g).unwrap();
        let h = read_graph(&p1).unwrap();
        assert_eq!(g.to_edge_list_text(), h.to_edge_list_text());
        let p2 = dir.path().join("c6.dot");
        fs::write(&p2, g.to_dot(&[])).unwrap();
        let d = read_graph(&p2).unwrap();
        assert_eq!(d.vertex_count(), 6);
        assert_eq!(d.edge_count(), 6);
    }

    #[test]
    fn labelling_roundtrip_with_relative_action() {
        let dir = tempfile::tempdir().unwrap();
        let a = make_cycle(4).unwrap();
        let f = Labelling::new(a, 2, vec![0, 1, 0, 1]).unwrap();
        let p = dir.path().join("f.lab");
        write_labelling(&p, &f, "f.act").unwrap();
        let g = read_labelling(&p).unwrap();
        assert_eq!(g.colors(), f.colors());
        assert_eq!(g.num_colors(), 2);
        assert_eq!(g.action().to_text(), f.action().to_text());
    }

    #[test]
    fn labelling_missing_header_fails() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.lab");
        fs::write(&p, "colors 2\nmap 0 1\n").unwrap();
        assert!(read_labelling(&p).is_err());
    }
}
