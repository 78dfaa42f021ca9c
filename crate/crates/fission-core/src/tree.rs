//! Fission trees: height-labeled dendrograms of the Stokes circles of an
//! irregular class.
//!
//! Leaves sit at height 0, one per circle. Going up, clusters merge where
//! the fission exponents say they must: the children of a join sit at the
//! fission exponent `f` realized by the merge, and the join itself sits at
//! the smallest point of `(1/Ram(common part)) Z` strictly above `f`,
//! clamped onto the parent's child position when the grid skips past it.
//! Along a branch, vertices occupy every grid point of the branch circle's
//! ramification; they are mandatory exactly at the circle's levels,
//! admissible at the remaining grid points, and empty elsewhere (for
//! instance a child position at an off-grid fission exponent).
//!
//! The trunk continues above the last join far enough to carry every
//! exponent of the top common part, plus one grid step; serialization
//! marks it as extensible since conceptually it is unbounded.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::diagram::{common_part, CommonPartData, IrregularClass};
use crate::error::{Error, Result};
use crate::puiseux::StokesCircle;
use crate::rational::{format_rational, grid_above, on_grid, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decoration {
    Mandatory,
    Admissible,
    Empty,
}

impl Decoration {
    pub fn as_str(&self) -> &'static str {
        match self {
            Decoration::Mandatory => "mandatory",
            Decoration::Admissible => "admissible",
            Decoration::Empty => "empty",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "mandatory" => Ok(Decoration::Mandatory),
            "admissible" => Ok(Decoration::Admissible),
            "empty" => Ok(Decoration::Empty),
            other => Err(Error::Parse {
                offset: 0,
                message: format!("unknown decoration `{other}`"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Leaf,
    Internal,
    TrunkPoint,
}

impl NodeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            NodeKind::Leaf => "leaf",
            NodeKind::Internal => "internal",
            NodeKind::TrunkPoint => "trunk-point",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub height: Rational,
    pub decoration: Decoration,
    pub kind: NodeKind,
}

/// Leaf payload: the Stokes circle for trees built from a class, or a bare
/// label for abstract untwisted trees produced from a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeafLabel {
    Circle(StokesCircle),
    Abstract(String),
}

impl LeafLabel {
    pub fn circle(&self) -> Option<&StokesCircle> {
        match self {
            LeafLabel::Circle(c) => Some(c),
            LeafLabel::Abstract(_) => None,
        }
    }

    pub fn text(&self) -> String {
        match self {
            LeafLabel::Circle(c) => c.display_rep().to_string(),
            LeafLabel::Abstract(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Leaf {
    pub node: usize,
    pub label: LeafLabel,
    pub mult: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FissionTree {
    nodes: Vec<TreeNode>,
    parent: Vec<Option<usize>>,
    leaves: Vec<Leaf>,
    root: usize,
}

impl FissionTree {
    /// Assembles a tree from raw parts, recomputing node kinds.
    ///
    /// Structural validation only (single root, well-formed parent links,
    /// declared leaves exactly the childless nodes, leaves at height 0);
    /// height monotonicity and the decoration laws are the business of
    /// `verify_tree_properties`, so that damaged trees can be built and
    /// diagnosed.
    pub fn from_parts(
        heights: Vec<(Rational, Decoration)>,
        parent: Vec<Option<usize>>,
        leaves: Vec<Leaf>,
    ) -> Result<Self> {
        let n = heights.len();
        if parent.len() != n {
            return Err(Error::TreeClassMismatch("parent map size mismatch".into()));
        }
        let mut roots = Vec::new();
        for (i, p) in parent.iter().enumerate() {
            match p {
                None => roots.push(i),
                Some(p) if *p >= n => {
                    return Err(Error::TreeClassMismatch(format!(
                        "node {i} has out-of-range parent {p}"
                    )))
                }
                _ => {}
            }
        }
        if roots.len() != 1 {
            return Err(Error::TreeClassMismatch(format!(
                "expected exactly one root, found {}",
                roots.len()
            )));
        }
        let root = roots[0];
        // reachability doubles as a cycle check
        for start in 0..n {
            let mut cursor = start;
            let mut steps = 0;
            while let Some(p) = parent[cursor] {
                cursor = p;
                steps += 1;
                if steps > n {
                    return Err(Error::TreeClassMismatch("parent map has a cycle".into()));
                }
            }
            if cursor != root {
                return Err(Error::TreeClassMismatch(
                    "node not connected to the root".into(),
                ));
            }
        }
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                children[*p].push(i);
            }
        }
        let leaf_nodes: BTreeSet<usize> = leaves.iter().map(|l| l.node).collect();
        let childless: BTreeSet<usize> = (0..n).filter(|i| children[*i].is_empty()).collect();
        if leaf_nodes != childless || leaf_nodes.len() != leaves.len() {
            return Err(Error::TreeClassMismatch(
                "declared leaves must be exactly the childless nodes".into(),
            ));
        }
        for l in &leaves {
            if !heights[l.node].0.is_zero() {
                return Err(Error::TreeClassMismatch(format!(
                    "leaf node {} is not at height 0",
                    l.node
                )));
            }
        }
        // the trunk is everything strictly above the last branch vertex
        let mut trunk = BTreeSet::new();
        let mut cursor = root;
        while children[cursor].len() == 1 {
            trunk.insert(cursor);
            cursor = children[cursor][0];
        }
        let nodes = heights
            .into_iter()
            .enumerate()
            .map(|(i, (height, decoration))| TreeNode {
                height,
                decoration,
                kind: if leaf_nodes.contains(&i) {
                    NodeKind::Leaf
                } else if trunk.contains(&i) {
                    NodeKind::TrunkPoint
                } else {
                    NodeKind::Internal
                },
            })
            .collect();
        Ok(FissionTree {
            nodes,
            parent,
            leaves,
            root,
        })
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn parent(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn leaves(&self) -> &[Leaf] {
        &self.leaves
    }

    /// The topmost node: the serialized end of the (extensible) trunk.
    pub fn trunk_top(&self) -> usize {
        self.root
    }

    pub fn children_of(&self, node: usize) -> Vec<usize> {
        (0..self.nodes.len())
            .filter(|i| self.parent[*i] == Some(node))
            .collect()
    }

    /// Path from a node up to the trunk top, inclusive.
    pub fn path_to_root(&self, node: usize) -> Vec<usize> {
        let mut path = vec![node];
        let mut cursor = node;
        while let Some(p) = self.parent[cursor] {
            path.push(p);
            cursor = p;
        }
        path
    }

    /// Closest common ancestor of two nodes.
    pub fn lca(&self, a: usize, b: usize) -> usize {
        let on_a: BTreeSet<usize> = self.path_to_root(a).into_iter().collect();
        let mut cursor = b;
        loop {
            if on_a.contains(&cursor) {
                return cursor;
            }
            cursor = self.parent[cursor].expect("paths meet at the root");
        }
    }

    pub fn mutate_decoration(&self, node: usize, decoration: Decoration) -> Self {
        let mut t = self.clone();
        t.nodes[node].decoration = decoration;
        t
    }

    pub fn mutate_height(&self, node: usize, height: Rational) -> Self {
        let mut t = self.clone();
        t.nodes[node].height = height;
        t
    }
}

fn decoration_for(circle: &StokesCircle, h: &Rational) -> Decoration {
    if circle.levels().contains(h) {
        Decoration::Mandatory
    } else if on_grid(h, circle.ram()) {
        Decoration::Admissible
    } else {
        Decoration::Empty
    }
}

/// Grid points of `(1/r) Z` in the open interval `(lo, hi)`, ascending.
fn grid_points_between(r: u64, lo: &Rational, hi: &Rational) -> Vec<Rational> {
    let step = Rational::new(BigInt::from(1), BigInt::from(r));
    let mut points = Vec::new();
    let mut h = grid_above(lo, r);
    while h < *hi {
        points.push(h.clone());
        h += &step;
    }
    points
}

struct Builder {
    heights: Vec<(Rational, Decoration)>,
    parent: Vec<Option<usize>>,
}

impl Builder {
    fn add(&mut self, height: Rational, decoration: Decoration) -> usize {
        self.heights.push((height, decoration));
        self.parent.push(None);
        self.heights.len() - 1
    }

    fn link(&mut self, child: usize, parent: usize) {
        debug_assert!(
            self.heights[child].0 < self.heights[parent].0,
            "heights must strictly increase from child to parent"
        );
        self.parent[child] = Some(parent);
    }

    /// Adds a chain of nodes at the given ascending heights above `from`,
    /// decorated for `circle`; returns the top node.
    fn chain_up(&mut self, from: usize, heights: &[Rational], circle: &StokesCircle) -> usize {
        let mut top = from;
        for h in heights {
            let node = self.add(h.clone(), decoration_for(circle, h));
            self.link(top, node);
            top = node;
        }
        top
    }
}

#[derive(Clone, Copy)]
enum Part {
    Leaf(usize),
    Merge(usize),
}

struct Merge {
    f: Rational,
    parts: Vec<Part>,
    circle: StokesCircle,
}

/// Single-linkage merge forest on the fission-exponent matrix, with
/// simultaneous ties merged in one event. Well-defined because the
/// exponents satisfy the two-largest-equal law: cross distances are
/// cluster-constant and tie groups are cliques (asserted in debug builds).
fn merge_forest(circles: &[&StokesCircle]) -> Result<(Vec<Merge>, usize)> {
    let n = circles.len();
    let mut pairs: Vec<Vec<Option<CommonPartData>>> = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..i {
            let data = common_part(circles[i], circles[j])?;
            pairs[i][j] = Some(data.clone());
            pairs[j][i] = Some(data);
        }
    }
    let fission = |i: usize, j: usize| -> &Rational {
        &pairs[i][j].as_ref().unwrap().fission_exponent
    };

    let mut merges: Vec<Merge> = Vec::new();
    let mut alive: Vec<(Part, Vec<usize>)> = (0..n).map(|i| (Part::Leaf(i), vec![i])).collect();
    while alive.len() > 1 {
        let cross = |a: &[usize], b: &[usize]| -> Rational {
            let value = fission(a[0], b[0]).clone();
            debug_assert!(
                a.iter().all(|&x| b.iter().all(|&y| *fission(x, y) == value)),
                "fission exponents are not cluster-constant"
            );
            value
        };
        let mut fmin: Option<Rational> = None;
        for a in 0..alive.len() {
            for b in 0..a {
                let d = cross(&alive[a].1, &alive[b].1);
                if fmin.as_ref().map_or(true, |m| d < *m) {
                    fmin = Some(d);
                }
            }
        }
        let fmin = fmin.expect("at least one pair");
        // group clusters at mutual distance fmin
        let mut comp: Vec<usize> = (0..alive.len()).collect();
        for a in 0..alive.len() {
            for b in 0..a {
                if cross(&alive[a].1, &alive[b].1) == fmin {
                    let (ra, rb) = (comp[a], comp[b]);
                    if ra != rb {
                        let target = ra.min(rb);
                        for c in comp.iter_mut() {
                            if *c == ra || *c == rb {
                                *c = target;
                            }
                        }
                    }
                }
            }
        }
        #[cfg(debug_assertions)]
        for a in 0..alive.len() {
            for b in 0..a {
                if comp[a] == comp[b] {
                    debug_assert_eq!(
                        cross(&alive[a].1, &alive[b].1),
                        fmin,
                        "tie groups must be cliques"
                    );
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (idx, c) in comp.iter().enumerate() {
            groups.entry(*c).or_default().push(idx);
        }
        let mut next: Vec<(Part, Vec<usize>)> = Vec::new();
        for group in groups.values() {
            if group.len() == 1 {
                let (part, members) = alive[group[0]].clone();
                next.push((part, members));
                continue;
            }
            let mut parts = Vec::new();
            let mut members = Vec::new();
            for &g in group {
                parts.push(alive[g].0);
                members.extend(alive[g].1.iter().copied());
            }
            members.sort_unstable();
            let a = alive[group[0]].1[0];
            let b = alive[group[1]].1[0];
            let circle = pairs[a][b].as_ref().unwrap().common.clone();
            debug_assert!(
                group.iter().all(|&g1| group.iter().all(|&g2| {
                    g1 == g2
                        || alive[g1].1.iter().all(|&x| alive[g2].1.iter().all(|&y| {
                            pairs[x][y].as_ref().unwrap().common == circle
                        }))
                })),
                "cross pairs of one merge must share their common part"
            );
            merges.push(Merge {
                f: fmin.clone(),
                parts,
                circle,
            });
            next.push((Part::Merge(merges.len() - 1), members));
        }
        alive = next;
        alive.sort_by_key(|(_, m)| m[0]);
    }
    match alive.pop().expect("one cluster remains").0 {
        Part::Merge(m) => Ok((merges, m)),
        Part::Leaf(_) => unreachable!("n > 1 always ends in a merge"),
    }
}

/// Builds the fission tree of a nonempty irregular class.
pub fn build_tree(theta: &IrregularClass) -> Result<FissionTree> {
    if theta.is_empty() {
        return Err(Error::EmptyClass);
    }
    let circles: Vec<&StokesCircle> = theta.circles().collect();
    let mults: Vec<u32> = theta.entries().iter().map(|(_, m)| *m).collect();
    let n = circles.len();
    let mut b = Builder {
        heights: Vec::new(),
        parent: Vec::new(),
    };
    let leaf_nodes: Vec<usize> = (0..n)
        .map(|_| b.add(Rational::zero(), Decoration::Empty))
        .collect();

    if n == 1 {
        let c = circles[0];
        let slope = c.slope().clone();
        if slope.is_positive() {
            let mut heights = grid_points_between(c.ram(), &Rational::zero(), &slope);
            heights.push(slope);
            b.chain_up(leaf_nodes[0], &heights, c);
        }
    } else {
        let (merges, top) = merge_forest(&circles)?;
        let c_top = merges[top].circle.clone();
        let h_top = grid_above(&merges[top].f, c_top.ram());
        let join_top = b.add(h_top.clone(), decoration_for(&c_top, &h_top));
        // the trunk carries the remaining exponents of the top common
        // part, plus one grid step
        let step = Rational::new(BigInt::from(1), BigInt::from(c_top.ram()));
        let trunk_end = h_top.clone().max(c_top.slope().clone()) + step;
        let mut trunk_heights = grid_points_between(c_top.ram(), &h_top, &trunk_end);
        trunk_heights.push(trunk_end);
        b.chain_up(join_top, &trunk_heights, &c_top);
        build_merge_children(&mut b, &merges, top, join_top, &leaf_nodes, &circles);
    }

    let leaves = (0..n)
        .map(|i| Leaf {
            node: leaf_nodes[i],
            label: LeafLabel::Circle(circles[i].clone()),
            mult: mults[i],
        })
        .collect();
    FissionTree::from_parts(b.heights, b.parent, leaves)
}

fn build_merge_children(
    b: &mut Builder,
    merges: &[Merge],
    m_idx: usize,
    join_node: usize,
    leaf_nodes: &[usize],
    circles: &[&StokesCircle],
) {
    let f = merges[m_idx].f.clone();
    for part in &merges[m_idx].parts {
        match part {
            Part::Leaf(i) => {
                let circle = circles[*i];
                let mut heights = grid_points_between(circle.ram(), &Rational::zero(), &f);
                heights.push(f.clone());
                let top = b.chain_up(leaf_nodes[*i], &heights, circle);
                b.link(top, join_node);
            }
            Part::Merge(k) => {
                let sub = &merges[*k];
                let circle = sub.circle.clone();
                let candidate = grid_above(&sub.f, circle.ram());
                // the grid point may overshoot the parent's child height;
                // the join is then clamped onto the child position
                let h_join = candidate.min(f.clone());
                let join_k = b.add(h_join.clone(), decoration_for(&circle, &h_join));
                if h_join < f {
                    let mut heights = grid_points_between(circle.ram(), &h_join, &f);
                    heights.push(f.clone());
                    let top = b.chain_up(join_k, &heights, &circle);
                    b.link(top, join_node);
                } else {
                    b.link(join_k, join_node);
                }
                build_merge_children(b, merges, *k, join_k, leaf_nodes, circles);
            }
        }
    }
}

/// One named check of `verify_tree_properties`.
#[derive(Debug, Clone)]
pub struct TreeCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct TreeReport {
    pub checks: Vec<TreeCheck>,
}

impl TreeReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &TreeCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

impl fmt::Display for TreeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(f, "{} {}", if c.pass { "pass" } else { "FAIL" }, c.name)?;
            if !c.detail.is_empty() {
                write!(f, ": {}", c.detail)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Audits a tree against the class it claims to represent: per leaf, the
/// mandatory heights on its full branch are exactly the circle's levels
/// and every exponent is an admissible height; per leaf pair, the children
/// of the closest common ancestor sit at the fission exponent, the
/// ancestor clears it, and the common part's exponents clear the ancestor.
pub fn verify_tree_properties(tree: &FissionTree, theta: &IrregularClass) -> Result<TreeReport> {
    let tree_circles: Vec<(StokesCircle, u32)> = tree
        .leaves()
        .iter()
        .map(|l| {
            l.label
                .circle()
                .map(|c| (c.clone(), l.mult))
                .ok_or_else(|| Error::TreeClassMismatch("tree has abstract leaves".into()))
        })
        .collect::<Result<_>>()?;
    {
        let mut sorted = tree_circles.clone();
        sorted.sort_by(|(c1, _), (c2, _)| c1.cmp(c2));
        let class: Vec<(StokesCircle, u32)> = theta
            .entries()
            .iter()
            .map(|(c, m)| (c.clone(), *m))
            .collect();
        if sorted != class {
            return Err(Error::TreeClassMismatch(
                "leaves are not the circles of the class".into(),
            ));
        }
    }

    let mut checks = Vec::new();
    for (idx, leaf) in tree.leaves().iter().enumerate() {
        let circle = &tree_circles[idx].0;
        let path = tree.path_to_root(leaf.node);
        let mandatory: BTreeSet<Rational> = path
            .iter()
            .filter(|&&v| tree.nodes()[v].decoration == Decoration::Mandatory)
            .map(|&v| tree.nodes()[v].height.clone())
            .collect();
        let levels: BTreeSet<Rational> = circle.levels().iter().cloned().collect();
        let pass = mandatory == levels;
        checks.push(TreeCheck {
            name: format!("levels(leaf {idx})"),
            pass,
            detail: if pass {
                String::new()
            } else {
                format!(
                    "mandatory heights {{{}}} != levels {{{}}} on branch of {}",
                    join_heights(&mandatory),
                    join_heights(&levels),
                    circle
                )
            },
        });
        let admissible: BTreeSet<Rational> = path
            .iter()
            .filter(|&&v| tree.nodes()[v].decoration != Decoration::Empty)
            .map(|&v| tree.nodes()[v].height.clone())
            .collect();
        let missing: Vec<&Rational> = circle
            .exponents()
            .iter()
            .filter(|e| !admissible.contains(*e))
            .collect();
        checks.push(TreeCheck {
            name: format!("exponents(leaf {idx})"),
            pass: missing.is_empty(),
            detail: if missing.is_empty() {
                String::new()
            } else {
                format!(
                    "exponent {} of {} has no admissible vertex",
                    format_rational(missing[0]),
                    circle
                )
            },
        });
    }

    for i in 0..tree.leaves().len() {
        for j in 0..i {
            let ci = &tree_circles[i].0;
            let cj = &tree_circles[j].0;
            let data = common_part(ci, cj)?;
            let v = tree.lca(tree.leaves()[i].node, tree.leaves()[j].node);
            let f = &data.fission_exponent;
            let bad_child = tree
                .children_of(v)
                .into_iter()
                .find(|&c| tree.nodes()[c].height != *f);
            checks.push(TreeCheck {
                name: format!("join-children(leaves {j},{i})"),
                pass: bad_child.is_none(),
                detail: match bad_child {
                    None => String::new(),
                    Some(c) => format!(
                        "child of the ancestor sits at {}, expected fission exponent {}",
                        format_rational(&tree.nodes()[c].height),
                        format_rational(f)
                    ),
                },
            });
            let h_v = &tree.nodes()[v].height;
            let min_exp = data.common.exponents().last().cloned();
            let pass = h_v > f && min_exp.as_ref().map_or(true, |m| m >= h_v);
            checks.push(TreeCheck {
                name: format!("ancestor-height(leaves {j},{i})"),
                pass,
                detail: if pass {
                    String::new()
                } else {
                    format!(
                        "ancestor at {} must exceed f = {} and not exceed min E(common) = {}",
                        format_rational(h_v),
                        format_rational(f),
                        min_exp
                            .map(|m| format_rational(&m))
                            .unwrap_or_else(|| "-".into())
                    )
                },
            });
        }
    }
    Ok(TreeReport { checks })
}

fn join_heights(set: &BTreeSet<Rational>) -> String {
    set.iter()
        .map(format_rational)
        .collect::<Vec<_>>()
        .join(", ")
}
