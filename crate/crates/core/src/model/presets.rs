//! Named finite groups accepted in model files.

use super::{validate_group, FiniteGroup, ModelError};

pub fn cyclic(n: usize) -> FiniteGroup {
    let table: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    let g = validate_group(&table).expect("cyclic table");
    let names = (0..n).map(|k| k.to_string()).collect();
    g.with_names(names).expect("names")
}

/// Z/m x Z/n, element (i, j) stored at i*n + j.
pub fn cyclic_product(m: usize, n: usize) -> FiniteGroup {
    let ord = m * n;
    let table: Vec<Vec<usize>> = (0..ord)
        .map(|a| {
            (0..ord)
                .map(|b| ((a / n + b / n) % m) * n + (a % n + b % n) % n)
                .collect()
        })
        .collect();
    let g = validate_group(&table).expect("product table");
    let names = (0..ord).map(|a| format!("({},{})", a / n, a % n)).collect();
    g.with_names(names).expect("names")
}

/// Symmetric group on three letters; elements in lexicographic order of images.
pub fn s3() -> FiniteGroup {
    let perms: Vec<[usize; 3]> = vec![
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let idx = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
    let table: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| {
            perms
                .iter()
                .map(|q| idx([p[q[0]], p[q[1]], p[q[2]]]))
                .collect()
        })
        .collect();
    let g = validate_group(&table).expect("S3 table");
    let names = perms
        .iter()
        .map(|p| format!("[{}{}{}]", p[0] + 1, p[1] + 1, p[2] + 1))
        .collect();
    g.with_names(names).expect("names")
}

/// Dihedral group of order 8: r^k at index k, s r^k at index 4 + k.
pub fn d4() -> FiniteGroup {
    let n = 4;
    let mul = |a: usize, b: usize| -> usize {
        let (fa, ka) = (a / n, a % n);
        let (fb, kb) = (b / n, b % n);
        // r^ka s^fa ... written as s^fa r^ka; r s = s r^-1
        let k = if fb == 1 { (n + kb - ka % n) % n } else { (ka + kb) % n };
        ((fa + fb) % 2) * n + k
    };
    let table: Vec<Vec<usize>> = (0..2 * n).map(|a| (0..2 * n).map(|b| mul(a, b)).collect()).collect();
    let g = validate_group(&table).expect("D4 table");
    let names = (0..2 * n)
        .map(|a| match (a / n, a % n) {
            (0, 0) => "1".to_string(),
            (0, k) => format!("r{k}"),
            (_, 0) => "s".to_string(),
            (_, k) => format!("sr{k}"),
        })
        .collect();
    g.with_names(names).expect("names")
}

/// Resolve a preset name: "Z/n", "Z/mxZ/n", "S3", "D4", "1".
pub fn preset(name: &str) -> Result<FiniteGroup, ModelError> {
    let s = name.trim();
    let parse_cyclic = |t: &str| -> Option<usize> {
        t.strip_prefix("Z/").and_then(|k| k.parse::<usize>().ok()).filter(|&k| k >= 1)
    };
    match s {
        "1" | "trivial" => return Ok(cyclic(1)),
        "S3" => return Ok(s3()),
        "D4" => return Ok(d4()),
        _ => {}
    }
    if let Some((a, b)) = s.split_once('x') {
        if let (Some(m), Some(n)) = (parse_cyclic(a.trim()), parse_cyclic(b.trim())) {
            return Ok(cyclic_product(m, n));
        }
    }
    if let Some(n) = parse_cyclic(s) {
        return Ok(cyclic(n));
    }
    Err(ModelError::UnknownPreset(name.to_string()))
}
