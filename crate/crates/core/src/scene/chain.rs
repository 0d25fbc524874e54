//! Event sequence lines.

use std::collections::BTreeSet;

use super::SceneError;

/// An event as seen by chain building: id, center time and declared predecessors.
#[derive(Debug, Clone, Copy)]
pub struct ChainEvent<'a> {
    pub id: &'a str,
    pub center_y: f64,
    pub predecessors: &'a [String],
}

/// Splits events into ordered chains of indices into `events`.
///
/// Without declared links the result is one chronological chain. With links,
/// every edge between present events becomes part of a path, and paths are
/// merged through events with exactly one incoming and one outgoing link.
/// Events touched by no link come back as singleton chains.
pub fn build_event_chain(events: &[ChainEvent<'_>]) -> Result<Vec<Vec<usize>>, SceneError> {
    let mut order: Vec<usize> = (0..events.len()).collect();
    order.sort_by(|&a, &b| {
        events[a].center_y.total_cmp(&events[b].center_y).then_with(|| events[a].id.cmp(events[b].id))
    });
    if events.iter().all(|e| e.predecessors.is_empty()) {
        return Ok(if order.is_empty() { Vec::new() } else { vec![order] });
    }

    let mut rank = vec![0; events.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    let position = |id: &str| events.iter().position(|e| e.id == id);
    let mut succ: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new(); events.len()];
    let mut indeg = vec![0usize; events.len()];
    for (v, e) in events.iter().enumerate() {
        let preds: BTreeSet<usize> = e.predecessors.iter().filter_map(|p| position(p)).collect();
        for u in preds {
            succ[u].insert((rank[v], v));
            indeg[v] += 1;
        }
    }
    let outdeg: Vec<usize> = succ.iter().map(BTreeSet::len).collect();

    if let Some(id) = cycle_member(events, &succ, &indeg) {
        return Err(SceneError::CyclicEventLinks(id));
    }

    let passes_through = |v: usize| indeg[v] == 1 && outdeg[v] == 1;
    let mut chains: Vec<Vec<usize>> = Vec::new();
    for &u in &order {
        if passes_through(u) {
            continue;
        }
        if indeg[u] == 0 && outdeg[u] == 0 {
            chains.push(vec![u]);
            continue;
        }
        for &(_, v) in &succ[u] {
            let mut path = vec![u, v];
            let mut cur = v;
            while passes_through(cur) {
                let &(_, next) = succ[cur].iter().next().expect("out-degree one");
                path.push(next);
                cur = next;
            }
            chains.push(path);
        }
    }
    chains.sort_by_key(|c| c.iter().map(|&i| rank[i]).collect::<Vec<_>>());
    Ok(chains)
}

fn cycle_member(
    events: &[ChainEvent<'_>],
    succ: &[BTreeSet<(usize, usize)>],
    indeg: &[usize],
) -> Option<String> {
    let mut remaining = indeg.to_vec();
    let mut queue: Vec<usize> = (0..events.len()).filter(|&i| remaining[i] == 0).collect();
    let mut removed = 0;
    while let Some(u) = queue.pop() {
        removed += 1;
        for &(_, v) in &succ[u] {
            remaining[v] -= 1;
            if remaining[v] == 0 {
                queue.push(v);
            }
        }
    }
    if removed == events.len() {
        return None;
    }
    (0..events.len()).filter(|&i| remaining[i] > 0).map(|i| events[i].id.to_owned()).min()
}
