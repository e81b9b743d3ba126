use std::collections::VecDeque;

use super::TauError;

/// Distance reported when the target set cannot be reached. States inside
/// `A` that no outside state can reach get `-UNREACHABLE`.
pub const UNREACHABLE: i64 = i64::MAX;

/// Signed directed hop distance of every state to the set `A` given by
/// `in_set`: outside `A`, the length of the shortest admissible path into
/// `A`; inside `A`, minus the length of the shortest path from a state
/// outside `A`.
pub fn signed_distances(successors: &[Vec<usize>], in_set: &[bool]) -> Result<Vec<i64>, TauError> {
    let n = successors.len();
    if in_set.len() != n {
        return Err(TauError::Malformed("membership mask length differs from state count".into()));
    }
    if !in_set.iter().any(|&b| b) {
        return Err(TauError::DegenerateSet("the satisfying set is empty"));
    }
    if in_set.iter().all(|&b| b) {
        return Err(TauError::DegenerateSet("every state is satisfying"));
    }
    let mut predecessors = vec![Vec::new(); n];
    for (s, succ) in successors.iter().enumerate() {
        for &t in succ {
            predecessors[t].push(s);
        }
    }
    // to A: walk predecessors back from A; from the complement: walk forward
    let to_a = bfs(&predecessors, in_set, true);
    let from_out = bfs(successors, in_set, false);
    Ok((0..n)
        .map(|s| {
            if in_set[s] {
                from_out[s].map_or(-UNREACHABLE, |d| -(d as i64))
            } else {
                to_a[s].map_or(UNREACHABLE, |d| d as i64)
            }
        })
        .collect())
}

fn bfs(adj: &[Vec<usize>], in_set: &[bool], sources_in: bool) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    let mut queue = VecDeque::new();
    for s in 0..adj.len() {
        if in_set[s] == sources_in {
            dist[s] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(s) = queue.pop_front() {
        let d = dist[s].unwrap() + 1;
        for &t in &adj[s] {
            if dist[t].is_none() {
                dist[t] = Some(d);
                queue.push_back(t);
            }
        }
    }
    dist
}
