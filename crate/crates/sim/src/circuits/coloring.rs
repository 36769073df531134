//! Misra-Gries edge coloring with at most Δ+1 colors, used to group the
//! RZZ separator terms into classes of disjoint edges.

/// Colors the given simple edges with at most `Δ + 1` colors such that no
/// two edges sharing a vertex receive the same color. Returns one color per
/// input edge, in input order. Deterministic.
pub fn misra_gries_coloring(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let max_deg = {
        let mut deg = vec![0usize; n];
        for &(a, b) in edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    };
    let palette = max_deg + 1;

    // at[v][c] = Some((other endpoint, edge index)) if an edge at v has color c.
    let mut at: Vec<Vec<Option<(usize, usize)>>> = vec![vec![None; palette]; n];
    let mut colors: Vec<Option<usize>> = vec![None; edges.len()];

    let free = |at: &[Vec<Option<(usize, usize)>>], v: usize| -> usize {
        (0..palette)
            .find(|&c| at[v][c].is_none())
            .expect("a free color always exists with Δ+1 colors")
    };
    let set = |at: &mut [Vec<Option<(usize, usize)>>],
               colors: &mut [Option<usize>],
               e: usize,
               (a, b): (usize, usize),
               c: usize| {
        at[a][c] = Some((b, e));
        at[b][c] = Some((a, e));
        colors[e] = Some(c);
    };
    let unset = |at: &mut [Vec<Option<(usize, usize)>>],
                 colors: &mut [Option<usize>],
                 e: usize,
                 (a, b): (usize, usize)| {
        if let Some(c) = colors[e].take() {
            at[a][c] = None;
            at[b][c] = None;
        }
    };

    for (e, &(u, v)) in edges.iter().enumerate() {
        debug_assert!(u != v && u < n && v < n);

        // Maximal fan of u starting at v: each next vertex is reached by an
        // edge whose color is free on the previous fan vertex. Candidates are
        // scanned in ascending color order for determinism.
        let mut fan: Vec<(usize, usize)> = vec![(v, e)]; // (vertex, edge index)
        'grow: loop {
            let last = fan.last().unwrap().0;
            for c in 0..palette {
                if at[last][c].is_none() {
                    if let Some((w, ew)) = at[u][c] {
                        if !fan.iter().any(|&(x, _)| x == w) {
                            fan.push((w, ew));
                            continue 'grow;
                        }
                    }
                }
            }
            break;
        }

        let c = free(&at, u);
        let d = free(&at, fan.last().unwrap().0);

        if c != d {
            // Invert the maximal cd-path through u, starting along color d.
            let mut path = Vec::new();
            let mut x = u;
            let mut col = d;
            while let Some((y, ep)) = at[x][col] {
                path.push(ep);
                x = y;
                col = if col == d { c } else { d };
            }
            for &ep in &path {
                let old = colors[ep].unwrap();
                unset(&mut at, &mut colors, ep, edges[ep]);
                colors[ep] = Some(if old == c { d } else { c });
                // Re-register below once all removals are done.
            }
            for &ep in &path {
                let nc = colors[ep].unwrap();
                let (a, b) = edges[ep];
                at[a][nc] = Some((b, ep));
                at[b][nc] = Some((a, ep));
            }
        }

        // Find the shortest fan prefix ending at a vertex where d is free
        // (after inversion), then rotate it.
        let mut w_idx = None;
        for (i, &(x, _)) in fan.iter().enumerate() {
            if i > 0 {
                // Prefix must still be a fan: edge to fan[i] colored with a
                // color free on fan[i-1].
                let ec = colors[fan[i].1];
                let prev = fan[i - 1].0;
                let still_fan =
                    ec.is_some_and(|col| at[prev][col].is_none());
                if !still_fan {
                    break;
                }
            }
            if at[x][d].is_none() {
                w_idx = Some(i);
                break;
            }
        }
        let w_idx = w_idx.expect("Misra-Gries guarantees a rotatable prefix");

        // Rotate: shift each fan edge's color one step toward the front.
        for i in 0..w_idx {
            let next_color = colors[fan[i + 1].1].unwrap();
            unset(&mut at, &mut colors, fan[i + 1].1, edges[fan[i + 1].1]);
            unset(&mut at, &mut colors, fan[i].1, edges[fan[i].1]);
            set(&mut at, &mut colors, fan[i].1, edges[fan[i].1], next_color);
        }
        let (w, ew) = fan[w_idx];
        debug_assert!(at[u][d].is_none() && at[w][d].is_none());
        set(&mut at, &mut colors, ew, edges[ew], d);
    }

    colors.into_iter().map(|c| c.unwrap()).collect()
}
