use std::collections::{BTreeMap, BTreeSet};

/// Nodes that lie on a directed cycle (including self-loops), via Tarjan's SCC.
pub(crate) fn cyclic_nodes<N: Ord + Clone>(edges: &[(N, N)]) -> BTreeSet<N> {
    let mut adj: BTreeMap<&N, Vec<&N>> = BTreeMap::new();
    for (a, b) in edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default();
    }
    let nodes: Vec<&N> = adj.keys().copied().collect();
    let index_of: BTreeMap<&N, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let succ: Vec<Vec<usize>> = nodes.iter().map(|n| adj[n].iter().map(|m| index_of[m]).collect()).collect();

    let n = nodes.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next = 0;
    let mut out = BTreeSet::new();

    // iterative Tarjan: frames of (node, next successor position)
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut frames = vec![(root, 0usize)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = frames.last_mut() {
            if *pos < succ[v].len() {
                let w = succ[v][*pos];
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            frames.pop();
            if let Some(&(parent, _)) = frames.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut component = Vec::new();
                loop {
                    let w = stack.pop().expect("scc stack");
                    on_stack[w] = false;
                    component.push(w);
                    if w == v {
                        break;
                    }
                }
                if component.len() > 1 || succ[v].contains(&v) {
                    out.extend(component.into_iter().map(|i| nodes[i].clone()));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cycles_and_self_loops() {
        let edges = [(1, 2), (2, 3), (3, 1), (3, 4), (5, 5), (6, 7)];
        assert_eq!(cyclic_nodes(&edges), BTreeSet::from([1, 2, 3, 5]));
        assert!(cyclic_nodes::<u8>(&[]).is_empty());
        assert!(cyclic_nodes(&[(1, 2), (1, 3), (2, 3)]).is_empty());
    }
}
