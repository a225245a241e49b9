//! Independent oracles shared by the integration and acceptance tests. None
//! of these call into the library's algorithms.
#![allow(dead_code)]

use rand::Rng;

/// Random model: `n` tokens of dimension `dim`. Some tokens get case
/// variants and a few rows are quantized so that similarity ties occur.
pub fn synthetic_model<R: Rng>(rng: &mut R, n: usize, dim: usize) -> (Vec<String>, Vec<f32>) {
    let mut tokens = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n * dim);
    for i in 0..n {
        let token = match i % 17 {
            3 if i > 3 => format!("W{}", i - 3),
            5 => format!("tok_{i}_x"),
            _ => format!("w{i}"),
        };
        tokens.push(token);
        let quantized = i % 11 == 0;
        for _ in 0..dim {
            let x: f32 = rng.gen_range(-1.0..1.0);
            vectors.push(if quantized { (x * 2.0).round() / 2.0 } else { x });
        }
    }
    (tokens, vectors)
}

/// Unit rows as the documented cosine definition prescribes: norm and
/// division in f64, stored as f32.
pub fn unit_rows(vectors: &[f32], dim: usize) -> Vec<Option<Vec<f32>>> {
    vectors
        .chunks(dim)
        .map(|row| {
            let norm = row.iter().map(|&x| (x as f64).powi(2)).sum::<f64>().sqrt();
            (norm >= 1e-12).then(|| row.iter().map(|&x| (x as f64 / norm) as f32).collect())
        })
        .collect()
}

fn dot_f32(a: &[f32], b: &[f32]) -> f32 {
    let mut acc = 0.0f32;
    for i in 0..a.len() {
        acc += a[i] * b[i];
    }
    acc
}

/// Full scan: score every other usable token, sort by similarity
/// descending then token ascending, keep `k`.
pub fn brute_force_top_k(tokens: &[String], vectors: &[f32], dim: usize, query: usize, k: usize) -> Vec<(String, f32)> {
    let units = unit_rows(vectors, dim);
    let q = units[query].as_ref().expect("usable query");
    let mut all: Vec<(String, f32)> = (0..tokens.len())
        .filter(|&i| i != query)
        .filter_map(|i| units[i].as_ref().map(|u| (tokens[i].clone(), dot_f32(q, u))))
        .collect();
    all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

/// Case-folded variant: every case variant of the query is excluded and
/// only the best-ranked spelling of each lowercase key is kept.
pub fn brute_force_top_k_folded(tokens: &[String], vectors: &[f32], dim: usize, query: usize, k: usize) -> Vec<(String, f32)> {
    let key = tokens[query].to_lowercase();
    let units = unit_rows(vectors, dim);
    let q = units[query].as_ref().expect("usable query");
    let mut all: Vec<(String, f32)> = (0..tokens.len())
        .filter(|&i| tokens[i].to_lowercase() != key)
        .filter_map(|i| units[i].as_ref().map(|u| (tokens[i].clone(), dot_f32(q, u))))
        .collect();
    all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    let mut seen = std::collections::HashSet::new();
    all.retain(|(t, _)| seen.insert(t.to_lowercase()));
    all.truncate(k);
    all
}

/// word2vec binary writer written from the format description: ASCII
/// header `"<n> <dim>\n"`, then per record the token bytes, one space, `dim`
/// little-endian f32 values and (when `newline`) a trailing `\n`.
pub fn write_w2v_binary(tokens: &[String], vectors: &[f32], dim: usize, newline: bool) -> Vec<u8> {
    let mut out = format!("{} {}\n", tokens.len(), dim).into_bytes();
    for (t, row) in tokens.iter().zip(vectors.chunks(dim)) {
        out.extend_from_slice(t.as_bytes());
        out.push(b' ');
        for x in row {
            out.extend_from_slice(&x.to_le_bytes());
        }
        if newline {
            out.push(b'\n');
        }
    }
    out
}

/// Tokens and vectors whose byte encodings put 0x0A right next to token
/// boundaries: f32 values whose first or last LE byte is a line feed.
pub fn lf_adjacent_model<R: Rng>(rng: &mut R, n: usize, dim: usize) -> (Vec<String>, Vec<f32>) {
    let mut tokens = Vec::new();
    let mut vectors = Vec::new();
    for i in 0..n {
        tokens.push(match i % 4 {
            0 => format!("lf{i}"),
            1 => format!("é{i}-ü"),
            2 => format!("a.b_{i}"),
            _ => format!("T{i}"),
        });
        for d in 0..dim {
            let mut bytes = rng.gen::<f32>().to_le_bytes();
            if d == 0 {
                bytes[0] = b'\n';
            }
            if d + 1 == dim {
                bytes[3] = b'\n';
            }
            let x = f32::from_le_bytes(bytes);
            vectors.push(if x.is_finite() { x } else { 0.5 });
        }
    }
    (tokens, vectors)
}

/// Modularity from its definition over a dense adjacency matrix:
/// `Q = 1/2m Σ_ij [A_ij − k_i k_j / 2m] δ(c_i, c_j)`.
pub fn dense_modularity(n: usize, edges: &[(usize, usize, f64)], labels: &[usize]) -> f64 {
    let mut a = vec![vec![0.0; n]; n];
    for &(u, v, w) in edges {
        a[u][v] += w;
        a[v][u] += w;
    }
    let k: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Every set partition of `0..n` as restricted growth strings.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    fn grow(prefix: &mut Vec<usize>, n: usize, max: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for c in 0..=max + 1 {
            prefix.push(c);
            grow(prefix, n, max.max(c), out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        grow(&mut vec![0], n, 0, &mut out);
    }
    out
}

/// Dense damped power iteration with uniform redistribution of dangling
/// mass, run to a fixed large iteration count.
pub fn dense_pagerank(n: usize, edges: &[(usize, usize, f64)], damping: f64) -> Vec<f64> {
    let mut a = vec![vec![0.0; n]; n];
    for &(u, v, w) in edges {
        a[u][v] += w;
        a[v][u] += w;
    }
    let out: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let mut r = vec![1.0 / n as f64; n];
    for _ in 0..10_000 {
        let dangling: f64 = (0..n).filter(|&i| out[i] == 0.0).map(|i| r[i]).sum();
        let mut next = vec![(1.0 - damping) / n as f64 + damping * dangling / n as f64; n];
        for i in 0..n {
            for j in 0..n {
                if a[i][j] > 0.0 {
                    next[j] += damping * r[i] * a[i][j] / out[i];
                }
            }
        }
        r = next;
    }
    r
}
