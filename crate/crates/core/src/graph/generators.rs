use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Edge, GraphError, NodeId, PortGraph};

/// Largest size accepted by [`enumerate_connected`].
pub const MAX_ENUMERATION_NODES: usize = 4;

fn param(msg: impl Into<String>) -> GraphError {
    GraphError::Parameter(msg.into())
}

/// Cycle `0 -> 1 -> ... -> n-1 -> 0` with port 1 pointing forward and port 2
/// pointing back at every node.
pub fn consistent_cycle(n: usize) -> Result<PortGraph, GraphError> {
    if n < 3 {
        return Err(param(format!("a cycle needs at least 3 nodes, got {n}")));
    }
    let edges = (0..n).map(|i| Edge::new(i, 1, (i + 1) % n, 2));
    Ok(PortGraph::new(n, edges)?)
}

/// Consistent `m`-cycle on nodes `0..m` with a leaf `m + i` hanging off
/// cycle node `i` (port 3 at the cycle node, port 1 at the leaf).
pub fn sun(m: usize) -> Result<PortGraph, GraphError> {
    if m < 3 {
        return Err(param(format!("a sun needs a cycle of at least 3 nodes, got {m}")));
    }
    let cycle = (0..m).map(|i| Edge::new(i, 1, (i + 1) % m, 2));
    let rays = (0..m).map(|i| Edge::new(i, 3, m + i, 1));
    Ok(PortGraph::new(2 * m, cycle.chain(rays))?)
}

/// Path `0 - 1 - ... - n-1`. Internal nodes use port 1 toward the higher
/// index and port 2 toward the lower one; both ends have port 1 only.
pub fn path(n: usize) -> Result<PortGraph, GraphError> {
    if n == 0 {
        return Err(param("a path needs at least 1 node"));
    }
    let edges = (0..n.saturating_sub(1)).map(|i| {
        let back = if i + 1 == n - 1 { 1 } else { 2 };
        Edge::new(i, 1, i + 1, back)
    });
    Ok(PortGraph::new(n, edges)?)
}

/// Star with center 0 and leaves `1..n`; port `i` at the center leads to leaf `i`.
pub fn star(n: usize) -> Result<PortGraph, GraphError> {
    if n < 2 {
        return Err(param(format!("a star needs at least 2 nodes, got {n}")));
    }
    Ok(PortGraph::new(n, (1..n).map(|i| Edge::new(0, i, i, 1)))?)
}

/// Complete graph; at node `i`, neighbors are reached in increasing index order.
pub fn complete(n: usize) -> Result<PortGraph, GraphError> {
    if n == 0 {
        return Err(param("a complete graph needs at least 1 node"));
    }
    let port = |from: usize, to: usize| if to < from { to + 1 } else { to };
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push(Edge::new(u, port(u, v), v, port(v, u)));
        }
    }
    Ok(PortGraph::new(n, edges)?)
}

/// Every valid port-labeled graph on nodes `0..n`, each exactly once.
///
/// Order: underlying edge sets by ascending bitmask over the pairs
/// `(0,1), (0,2), ..., (n-2,n-1)`, then port assignments with the per-node
/// permutations in lexicographic order (node 0 varying slowest).
pub fn enumerate_connected(n: usize) -> Result<Vec<PortGraph>, GraphError> {
    if n == 0 || n > MAX_ENUMERATION_NODES {
        return Err(param(format!(
            "exhaustive enumeration supports 1..={MAX_ENUMERATION_NODES} nodes, got {n}"
        )));
    }
    if n == 1 {
        return Ok(vec![PortGraph::singleton()]);
    }
    let pairs: Vec<(NodeId, NodeId)> =
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut out = Vec::new();
    for mask in 1u32..(1 << pairs.len()) {
        let chosen: Vec<(NodeId, NodeId)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &p)| p)
            .collect();
        // incident[v] = indices into `chosen` of edges touching v, ascending
        let mut incident = vec![Vec::new(); n];
        for (i, &(u, v)) in chosen.iter().enumerate() {
            incident[u].push(i);
            incident[v].push(i);
        }
        if incident.iter().any(Vec::is_empty) || !connected(n, &chosen) {
            continue;
        }
        let perms: Vec<Vec<Vec<usize>>> =
            incident.iter().map(|inc| permutations(inc.len())).collect();
        let mut choice = vec![0usize; n];
        loop {
            // port of edge incident[v][k] at v is perms[v][choice[v]][k] + 1
            let mut ports = vec![(0, 0); chosen.len()];
            for v in 0..n {
                for (k, &e) in incident[v].iter().enumerate() {
                    let p = perms[v][choice[v]][k] + 1;
                    if chosen[e].0 == v {
                        ports[e].0 = p;
                    } else {
                        ports[e].1 = p;
                    }
                }
            }
            let edges = chosen
                .iter()
                .zip(&ports)
                .map(|(&(u, v), &(pu, pv))| Edge::new(u, pu, v, pv));
            out.push(PortGraph::new(n, edges).expect("enumerated graphs are valid"));
            // odometer with the last node varying fastest
            let mut v = n;
            let advanced = loop {
                if v == 0 {
                    break false;
                }
                v -= 1;
                choice[v] += 1;
                if choice[v] < perms[v].len() {
                    break true;
                }
                choice[v] = 0;
            };
            if !advanced {
                break;
            }
        }
    }
    Ok(out)
}

fn connected(n: usize, edges: &[(NodeId, NodeId)]) -> bool {
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut stack = vec![0];
    while let Some(u) = stack.pop() {
        for &(a, b) in edges {
            let other = if a == u {
                b
            } else if b == u {
                a
            } else {
                continue;
            };
            if !seen[other] {
                seen[other] = true;
                stack.push(other);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// All permutations of `0..k` in lexicographic order.
fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..k).collect();
    let mut out = vec![current.clone()];
    loop {
        let Some(i) = (1..k).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..k).rev().find(|&j| current[j] > current[i - 1]).expect("exists");
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(current.clone());
    }
}

/// Random connected graph: a random spanning tree, then every remaining pair
/// joined with probability `density`, then ports shuffled at every node.
pub fn random_graph(n: usize, density: f64, seed: u64) -> Result<PortGraph, GraphError> {
    if n == 0 {
        return Err(param("a graph needs at least 1 node"));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(param(format!("edge density must lie in [0, 1], got {density}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut present = vec![vec![false; n]; n];
    let mut pairs = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        present[u][v] = true;
        pairs.push((u, v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !present[u][v] && rng.gen_bool(density) {
                present[u][v] = true;
                pairs.push((u, v));
            }
        }
    }
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, &(u, v)) in pairs.iter().enumerate() {
        incident[u].push(i);
        incident[v].push(i);
    }
    let mut ports = vec![(0, 0); pairs.len()];
    for (v, inc) in incident.iter_mut().enumerate() {
        inc.shuffle(&mut rng);
        for (k, &e) in inc.iter().enumerate() {
            if pairs[e].0 == v {
                ports[e].0 = k + 1;
            } else {
                ports[e].1 = k + 1;
            }
        }
    }
    let mut relabel: Vec<NodeId> = (0..n).collect();
    relabel.shuffle(&mut rng);
    let edges = pairs
        .iter()
        .zip(&ports)
        .map(|(&(u, v), &(pu, pv))| Edge::new(relabel[u], pu, relabel[v], pv));
    Ok(PortGraph::new(n, edges)?)
}

/// Generator names accepted by [`generate`], with their parameters.
pub const GENERATORS: &[&str] = &[
    "cycle:<n>",
    "sun:<m>",
    "path:<n>",
    "star:<n>",
    "complete:<n>",
    "random:<n>:<density>:<seed>",
    "enum:<n>:<index>",
];

/// Builds a graph from a spec such as `cycle:6` or `random:5:0.3:7`.
pub fn generate(spec: &str) -> Result<PortGraph, GraphError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let int = |i: usize| -> Result<usize, GraphError> {
        let w = parts.get(i).ok_or_else(|| param(format!("`{spec}` is missing a parameter")))?;
        w.parse().map_err(|_| param(format!("`{w}` is not a count")))
    };
    let arity = |k: usize| {
        if parts.len() == k + 1 {
            Ok(())
        } else {
            Err(param(format!("`{}` takes {k} parameter(s)", parts[0])))
        }
    };
    match parts[0] {
        "cycle" => arity(1).and_then(|_| consistent_cycle(int(1)?)),
        "sun" => arity(1).and_then(|_| sun(int(1)?)),
        "path" => arity(1).and_then(|_| path(int(1)?)),
        "star" => arity(1).and_then(|_| star(int(1)?)),
        "complete" => arity(1).and_then(|_| complete(int(1)?)),
        "random" => {
            arity(3)?;
            let density = parts[2].parse().map_err(|_| param(format!("`{}` is not a density", parts[2])))?;
            let seed = parts[3].parse().map_err(|_| param(format!("`{}` is not a seed", parts[3])))?;
            random_graph(int(1)?, density, seed)
        }
        "enum" => {
            arity(2)?;
            let all = enumerate_connected(int(1)?)?;
            let i = int(2)?;
            let count = all.len();
            all.into_iter().nth(i).ok_or_else(|| param(format!("index {i} out of range, {count} graphs")))
        }
        other => Err(param(format!("unknown generator `{other}`; known: {}", GENERATORS.join(", ")))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specs() {
        assert_eq!(generate("cycle:5").unwrap(), consistent_cycle(5).unwrap());
        assert_eq!(generate("random:5:0.3:9").unwrap(), random_graph(5, 0.3, 9).unwrap());
        assert_eq!(generate("enum:2:0").unwrap().node_count(), 2);
        for bad in ["cycle", "cycle:x", "cycle:5:1", "enum:3:999", "blob:3", "random:5:2:1"] {
            assert!(generate(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn cycle3_shape() {
        let c = consistent_cycle(3).unwrap();
        assert_eq!(c.node_count(), 3);
        assert_eq!(c.edge_count(), 3);
        assert!((0..3).all(|v| c.degree(v) == 2));
        assert_eq!(c.neighbor(0, 1), (1, 2));
        assert_eq!(c.neighbor(0, 2), (2, 1));
    }

    #[test]
    fn sun_rays_use_port_three() {
        let s = sun(4).unwrap();
        assert_eq!(s.node_count(), 8);
        for i in 0..4 {
            assert_eq!(s.neighbor(i, 3), (4 + i, 1));
        }
    }

    #[test]
    fn path_ends_use_port_one() {
        let p = path(5).unwrap();
        assert_eq!(p.neighbor(0, 1), (1, 2));
        assert_eq!(p.neighbor(4, 1), (3, 1));
        assert_eq!(p.neighbor(2, 1), (3, 2));
        assert_eq!(p.neighbor(2, 2), (1, 1));
        assert_eq!(path(2).unwrap().edges(), vec![Edge::new(0, 1, 1, 1)]);
        assert_eq!(path(1).unwrap().node_count(), 1);
    }

    #[test]
    fn complete_and_star() {
        let k4 = complete(4).unwrap();
        assert_eq!(k4.edge_count(), 6);
        assert_eq!(k4.neighbor(2, 1), (0, 2));
        assert_eq!(k4.neighbor(2, 3), (3, 3));
        let s = star(4).unwrap();
        assert_eq!(s.degree(0), 3);
        assert_eq!(s.neighbor(0, 2), (2, 1));
    }

    #[test]
    fn bad_parameters() {
        assert!(consistent_cycle(2).is_err());
        assert!(sun(2).is_err());
        assert!(path(0).is_err());
        assert!(star(1).is_err());
        assert!(enumerate_connected(5).is_err());
        assert!(enumerate_connected(0).is_err());
        assert!(random_graph(4, 1.5, 0).is_err());
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(enumerate_connected(1).unwrap().len(), 1);
        assert_eq!(enumerate_connected(2).unwrap(), vec![path(2).unwrap()]);
    }

    #[test]
    fn permutations_are_lexicographic() {
        assert_eq!(
            permutations(3),
            vec![
                vec![0, 1, 2],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![2, 1, 0]
            ]
        );
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn random_graph_is_reproducible() {
        let a = random_graph(6, 0.3, 0xC0FFEE).unwrap();
        let b = random_graph(6, 0.3, 0xC0FFEE).unwrap();
        assert_eq!(a, b);
        assert_eq!(random_graph(6, 0.0, 1).unwrap().edge_count(), 5);
    }
}
