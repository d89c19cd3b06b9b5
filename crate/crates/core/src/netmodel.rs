//! Network topologies: the Wyner line and the hexagonal torus.
//!
//! Users are stored with 0-based indices. On the Wyner line the external
//! label of user `u` is `u + 1`. On the torus the cell with axial
//! coordinates `(a, b)` has index `b * W + a`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axial neighbour offsets of a hexagonal cell.
pub const HEX_OFFSETS: [(i64, i64); 6] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopologyKind {
    WynerLine,
    HexTorus { width: usize, height: usize },
}

/// Coarse topology family, used by the analytic module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopoKind {
    Wyner,
    Hex,
}

/// Interference graph. In both supported models the interference set of a
/// user equals its cooperation neighbourhood, so one adjacency list serves
/// both purposes.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    kind: TopologyKind,
    adjacency: Vec<Vec<usize>>,
}

/// Three-colouring of a hexagonal torus. Colours are stored as 0, 1, 2 and
/// reported externally as 1, 2, 3.
#[derive(Debug, Clone, PartialEq)]
pub struct HexPartition {
    color: Vec<u8>,
}

pub fn build_wyner(k: usize) -> Result<Topology> {
    if k == 0 {
        return Err(Error::Topology("a Wyner line needs at least one user".into()));
    }
    let adjacency = (0..k)
        .map(|u| {
            let mut n = Vec::with_capacity(2);
            if u > 0 {
                n.push(u - 1);
            }
            if u + 1 < k {
                n.push(u + 1);
            }
            n
        })
        .collect();
    Ok(Topology {
        kind: TopologyKind::WynerLine,
        adjacency,
    })
}

pub fn build_hex(width: usize, height: usize) -> Result<Topology> {
    if width < 3 || height < 3 {
        return Err(Error::Topology(format!(
            "hexagonal torus needs W, H >= 3, got {width}x{height}"
        )));
    }
    if !(width * height).is_multiple_of(3) {
        return Err(Error::Topology(format!(
            "hexagonal torus needs W*H divisible by 3, got {width}x{height}"
        )));
    }
    let (w, h) = (width as i64, height as i64);
    let adjacency = (0..width * height)
        .map(|idx| {
            let (a, b) = ((idx % width) as i64, (idx / width) as i64);
            HEX_OFFSETS
                .iter()
                .map(|&(da, db)| {
                    let na = (a + da).rem_euclid(w) as usize;
                    let nb = (b + db).rem_euclid(h) as usize;
                    nb * width + na
                })
                .collect()
        })
        .collect();
    Ok(Topology {
        kind: TopologyKind::HexTorus { width, height },
        adjacency,
    })
}

impl Topology {
    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    pub fn topo_kind(&self) -> TopoKind {
        match self.kind {
            TopologyKind::WynerLine => TopoKind::Wyner,
            TopologyKind::HexTorus { .. } => TopoKind::Hex,
        }
    }

    pub fn user_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    pub fn are_neighbors(&self, j: usize, k: usize) -> bool {
        self.adjacency[j].contains(&k)
    }

    /// Undirected edges `(j, k)` with `j < k`, each listed once.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (j, ns) in self.adjacency.iter().enumerate() {
            for &k in ns {
                if j < k {
                    out.push((j, k));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Axial coordinates `(a, b)` of a torus cell.
    pub fn hex_coords(&self, u: usize) -> Option<(usize, usize)> {
        match self.kind {
            TopologyKind::HexTorus { width, .. } => Some((u % width, u / width)),
            TopologyKind::WynerLine => None,
        }
    }

    /// Cell index of axial coordinates, wrapped onto the torus.
    pub fn hex_index(&self, a: i64, b: i64) -> Option<usize> {
        match self.kind {
            TopologyKind::HexTorus { width, height } => {
                let a = a.rem_euclid(width as i64) as usize;
                let b = b.rem_euclid(height as i64) as usize;
                Some(b * width + a)
            }
            TopologyKind::WynerLine => None,
        }
    }

    /// External label used in dumps and reports.
    pub fn label(&self, u: usize) -> usize {
        match self.kind {
            TopologyKind::WynerLine => u + 1,
            TopologyKind::HexTorus { .. } => u,
        }
    }
}

/// Graph distance in the cooperation graph.
pub fn hop_distance(topo: &Topology, j: usize, k: usize) -> usize {
    if let TopologyKind::WynerLine = topo.kind {
        return j.abs_diff(k);
    }
    bfs_distances(topo, j)[k].expect("torus is connected")
}

/// Breadth-first distances from `src` to every user.
pub fn bfs_distances(topo: &Topology, src: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; topo.user_count()];
    dist[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap_or(0);
        for &v in topo.neighbors(u) {
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Colours cell `(a, b)` with `(a + b) mod 3`.
///
/// The colouring is proper only when both torus dimensions are multiples of
/// three; otherwise the wrap-around edges join equal colours, so such tori
/// are rejected.
pub fn hex_color_partition(topo: &Topology) -> Result<HexPartition> {
    let TopologyKind::HexTorus { width, height } = topo.kind else {
        return Err(Error::Topology("colour partition needs a hexagonal torus".into()));
    };
    if width % 3 != 0 || height % 3 != 0 {
        return Err(Error::Topology(format!(
            "the (a+b) mod 3 colouring needs W and H divisible by 3, got {width}x{height}"
        )));
    }
    let color = (0..width * height)
        .map(|u| (((u % width) + (u / width)) % 3) as u8)
        .collect();
    Ok(HexPartition { color })
}

impl HexPartition {
    /// Colour class of a cell, in `0..3`.
    pub fn class(&self, u: usize) -> usize {
        self.color[u] as usize
    }

    /// Colour label of a cell, in `1..=3`.
    pub fn label(&self, u: usize) -> u8 {
        self.color[u] + 1
    }

    pub fn class_sizes(&self) -> [usize; 3] {
        let mut sizes = [0; 3];
        for &c in &self.color {
            sizes[c as usize] += 1;
        }
        sizes
    }

    pub fn len(&self) -> usize {
        self.color.len()
    }

    pub fn is_empty(&self) -> bool {
        self.color.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(topo: &Topology, u: usize) -> Vec<usize> {
        let mut v: Vec<usize> = topo.neighbors(u).iter().map(|&x| topo.label(x)).collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn wyner_neighbourhoods() {
        let t = build_wyner(3).unwrap();
        assert_eq!(labels(&t, 1), vec![1, 3]);
        assert_eq!(labels(&t, 0), vec![2]);
        let single = build_wyner(1).unwrap();
        assert!(single.neighbors(0).is_empty());
        assert!(build_wyner(0).is_err());
    }

    #[test]
    fn hex_dimensions_checked() {
        assert!(build_hex(4, 3).is_ok());
        assert!(build_hex(4, 4).is_err());
        assert!(build_hex(2, 3).is_err());
    }

    #[test]
    fn hex_small_torus_is_six_regular_with_distinct_neighbours() {
        let t = build_hex(3, 3).unwrap();
        for u in 0..9 {
            let mut n = t.neighbors(u).to_vec();
            n.sort_unstable();
            n.dedup();
            assert_eq!(n.len(), 6, "cell {u}");
            assert!(!n.contains(&u));
        }
    }

    #[test]
    fn hex_origin_neighbours_on_6x6() {
        let t = build_hex(6, 6).unwrap();
        let mut got: Vec<(usize, usize)> =
            t.neighbors(0).iter().map(|&v| t.hex_coords(v).unwrap()).collect();
        got.sort_unstable();
        let mut want = vec![(1, 0), (5, 0), (0, 1), (0, 5), (1, 1), (5, 5)];
        want.sort_unstable();
        assert_eq!(got, want);
    }

    #[test]
    fn hop_distances() {
        let w = build_wyner(10).unwrap();
        assert_eq!(hop_distance(&w, 3, 6), 3);
        assert_eq!(hop_distance(&w, 5, 5), 0);
        let h = build_hex(6, 6).unwrap();
        let target = h.hex_index(2, 2).unwrap();
        assert_eq!(hop_distance(&h, 0, target), 2);
    }

    #[test]
    fn colouring_labels_and_classes() {
        let t = build_hex(6, 6).unwrap();
        let p = hex_color_partition(&t).unwrap();
        assert_eq!(p.label(t.hex_index(0, 0).unwrap()), 1);
        assert_eq!(p.label(t.hex_index(1, 0).unwrap()), 2);
        assert_eq!(p.label(t.hex_index(1, 1).unwrap()), 3);
        assert_eq!(p.class_sizes(), [12, 12, 12]);
        for (j, k) in t.edges() {
            assert_ne!(p.class(j), p.class(k));
        }
    }

    #[test]
    fn colouring_rejects_improper_torus() {
        let t = build_hex(4, 3).unwrap();
        assert!(hex_color_partition(&t).is_err());
        assert!(hex_color_partition(&build_wyner(5).unwrap()).is_err());
    }

    #[test]
    fn three_neighbours_in_each_other_class() {
        let t = build_hex(9, 6).unwrap();
        let p = hex_color_partition(&t).unwrap();
        for u in 0..t.user_count() {
            let mut per = [0usize; 3];
            for &v in t.neighbors(u) {
                per[p.class(v)] += 1;
            }
            assert_eq!(per[p.class(u)], 0);
            assert_eq!(per.iter().sum::<usize>(), 6);
            for c in 0..3 {
                if c != p.class(u) {
                    assert_eq!(per[c], 3);
                }
            }
        }
    }
}
