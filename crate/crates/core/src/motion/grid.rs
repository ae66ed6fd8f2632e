//! Axis-aligned partition of the display into cuboids, built on the first
//! cloud of a group and reused unchanged for the rest of the group.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{PlanError, Result};
use crate::model::{Cell, Dims, Point, PointCloud};

/// Per-cuboid point limit for the cloud a grid is built on. `None` never
/// splits, which leaves one cuboid covering the whole display.
pub type Theta = Option<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cuboid {
    pub id: usize,
    /// Inclusive lower corner.
    pub lo: [u32; 3],
    /// Exclusive upper corner.
    pub hi: [u32; 3],
    /// Indices into the cloud the grid was built on.
    pub members: Vec<usize>,
}

impl Cuboid {
    pub fn contains(&self, c: Cell) -> bool {
        (0..3).all(|a| self.lo[a] <= c.axis(a) && c.axis(a) < self.hi[a])
    }

    pub fn volume(&self) -> u64 {
        (0..3).map(|a| (self.hi[a] - self.lo[a]) as u64).product()
    }
}

/// Two cuboids are neighbors when their spans overlap (with positive length)
/// along two axes and touch along the third.
pub fn are_neighbors(a: &Cuboid, b: &Cuboid) -> bool {
    let mut overlaps = 0;
    let mut abuts = 0;
    for ax in 0..3 {
        if a.lo[ax].max(b.lo[ax]) < a.hi[ax].min(b.hi[ax]) {
            overlaps += 1;
        } else if a.hi[ax] == b.lo[ax] || b.hi[ax] == a.lo[ax] {
            abuts += 1;
        }
    }
    overlaps == 2 && abuts == 1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
enum Node {
    Leaf(usize),
    Split { axis: usize, at: u32, low: usize, high: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub dims: Dims,
    pub theta: Theta,
    pub cuboids: Vec<Cuboid>,
    /// Neighbor ids per cuboid, ascending.
    pub neighbors: Vec<Vec<usize>>,
    /// Splits performed; the next split axis is `splits % 3`.
    pub splits: usize,
    nodes: Vec<Node>,
}

impl Grid {
    pub fn len(&self) -> usize {
        self.cuboids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuboids.is_empty()
    }

    /// The cuboid whose half-open bounds contain `c`.
    pub fn locate(&self, c: Cell) -> Option<usize> {
        if !self.dims.contains(c) {
            return None;
        }
        let mut n = 0;
        loop {
            match self.nodes[n] {
                Node::Leaf(id) => return Some(id),
                Node::Split { axis, at, low, high } => {
                    n = if c.axis(axis) < at { low } else { high };
                }
            }
        }
    }
}

struct Builder<'a> {
    points: &'a [Point],
    theta: usize,
    counter: usize,
    nodes: Vec<Node>,
    leaves: Vec<Leaf>,
}

struct Leaf {
    lo: [u32; 3],
    hi: [u32; 3],
    members: Vec<usize>,
}

impl Builder<'_> {
    fn locate(&self, c: Cell) -> usize {
        let mut n = 0;
        loop {
            match self.nodes[n] {
                Node::Leaf(_) => return n,
                Node::Split { axis, at, low, high } => {
                    n = if c.axis(axis) < at { low } else { high };
                }
            }
        }
    }

    fn leaf_of(&self, node: usize) -> usize {
        match self.nodes[node] {
            Node::Leaf(l) => l,
            Node::Split { .. } => unreachable!("split nodes hold no points"),
        }
    }

    fn insert(&mut self, idx: usize) -> Result<()> {
        let node = self.locate(self.points[idx].cell);
        let leaf = self.leaf_of(node);
        self.leaves[leaf].members.push(idx);
        if self.leaves[leaf].members.len() > self.theta {
            self.split(node)?;
        }
        Ok(())
    }

    /// Splits an overflowing leaf on the next round-robin axis at the member
    /// median, then keeps splitting whichever half still overflows.
    fn split(&mut self, node: usize) -> Result<()> {
        let leaf = self.leaf_of(node);
        for _ in 0..3 {
            let axis = self.counter % 3;
            self.counter += 1;
            let Some(at) = self.split_value(leaf, axis) else {
                continue;
            };
            let old = &mut self.leaves[leaf];
            let members = std::mem::take(&mut old.members);
            let (lo, hi) = (old.lo, old.hi);
            let (low_m, high_m): (Vec<usize>, Vec<usize>) = members
                .into_iter()
                .partition(|&i| self.points[i].cell.axis(axis) < at);
            let mut low_hi = hi;
            low_hi[axis] = at;
            let mut high_lo = lo;
            high_lo[axis] = at;
            self.leaves[leaf] = Leaf {
                lo,
                hi: low_hi,
                members: low_m,
            };
            let high_leaf = self.leaves.len();
            self.leaves.push(Leaf {
                lo: high_lo,
                hi,
                members: high_m,
            });
            let low_node = self.nodes.len();
            self.nodes.push(Node::Leaf(leaf));
            self.nodes.push(Node::Leaf(high_leaf));
            self.nodes[node] = Node::Split {
                axis,
                at,
                low: low_node,
                high: low_node + 1,
            };
            for child in [low_node, low_node + 1] {
                let l = self.leaf_of(child);
                if self.leaves[l].members.len() > self.theta {
                    self.split(child)?;
                }
            }
            return Ok(());
        }
        Err(PlanError::UnsplittableCuboid {
            cuboid: leaf,
            count: self.leaves[leaf].members.len(),
        })
    }

    /// Plane coordinate that puts the first `ceil(k/2)` members (in
    /// coordinate order) below it. When the median value repeats, the plane
    /// moves up to the next distinct value, or down to the median value if
    /// nothing larger exists. `None` when all members share the coordinate.
    fn split_value(&self, leaf: usize, axis: usize) -> Option<u32> {
        let mut coords: Vec<u32> = self.leaves[leaf]
            .members
            .iter()
            .map(|&i| self.points[i].cell.axis(axis))
            .collect();
        coords.sort_unstable();
        let m = coords.len().div_ceil(2);
        let median = coords[m - 1];
        coords[m..]
            .iter()
            .copied()
            .find(|&v| v > median)
            .or_else(|| (median > coords[0]).then_some(median))
    }

    fn finish(self, dims: Dims, theta: Theta) -> Grid {
        // Cuboid ids follow a depth-first walk, low side first.
        let mut order = Vec::with_capacity(self.leaves.len());
        let mut stack = vec![0usize];
        let mut nodes = self.nodes;
        while let Some(n) = stack.pop() {
            match nodes[n] {
                Node::Leaf(_) => order.push(n),
                Node::Split { low, high, .. } => {
                    stack.push(high);
                    stack.push(low);
                }
            }
        }
        let mut leaves: Vec<Option<Leaf>> = self.leaves.into_iter().map(Some).collect();
        let mut cuboids = Vec::with_capacity(order.len());
        for (id, &n) in order.iter().enumerate() {
            let Node::Leaf(l) = nodes[n] else { unreachable!() };
            let leaf = leaves[l].take().expect("each leaf visited once");
            nodes[n] = Node::Leaf(id);
            cuboids.push(Cuboid {
                id,
                lo: leaf.lo,
                hi: leaf.hi,
                members: leaf.members,
            });
        }
        let neighbors = neighbor_lists(&cuboids);
        Grid {
            dims,
            theta,
            cuboids,
            neighbors,
            splits: self.counter,
            nodes,
        }
    }
}

fn neighbor_lists(cuboids: &[Cuboid]) -> Vec<Vec<usize>> {
    cuboids
        .par_iter()
        .map(|a| {
            cuboids
                .iter()
                .filter(|b| b.id != a.id && are_neighbors(a, b))
                .map(|b| b.id)
                .collect()
        })
        .collect()
}

/// Builds the grid by inserting the cloud's points in order. Whenever a
/// cuboid exceeds `theta` points it is split in two.
pub fn build_grid(first: &PointCloud, dims: Dims, theta: Theta) -> Result<Grid> {
    if theta == Some(0) {
        return Err(PlanError::InvalidConfig("cuboid capacity must be at least 1".into()));
    }
    first.check_within(dims)?;
    let mut b = Builder {
        points: first.points(),
        theta: theta.unwrap_or(usize::MAX),
        counter: 0,
        nodes: vec![Node::Leaf(0)],
        leaves: vec![Leaf {
            lo: [0, 0, 0],
            hi: [dims.l, dims.h, dims.d],
            members: Vec::new(),
        }],
    };
    for i in 0..first.len() {
        b.insert(i)?;
    }
    Ok(b.finish(dims, theta))
}

/// Points of a cloud grouped by the cuboid containing them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occupancy {
    /// `members[j]` lists indices into the cloud, in cloud order.
    pub members: Vec<Vec<usize>>,
}

impl Occupancy {
    pub fn counts(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }
}

/// Assigns every point of `cloud` to its cuboid. Never splits, so cuboids
/// may end up over capacity.
pub fn populate_grid(grid: &Grid, cloud: &PointCloud) -> Result<Occupancy> {
    let mut members = vec![Vec::new(); grid.len()];
    for (i, p) in cloud.iter().enumerate() {
        let j = grid.locate(p.cell).ok_or_else(|| PlanError::OutOfBounds {
            cell: p.cell,
            dims: grid.dims.to_string(),
        })?;
        members[j].push(i);
    }
    Ok(Occupancy { members })
}
