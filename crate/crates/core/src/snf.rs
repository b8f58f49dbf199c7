//! Integer Smith normal form by repeated gcd pivoting.

/// Nonzero diagonal entries `d1 | d2 | ...` of the Smith normal form of `m`,
/// all positive.
pub fn smith_diagonal(m: &[Vec<i64>]) -> Vec<i64> {
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero absolute value in the remaining block
        let pivot = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| a[i][j] != 0)
            .min_by_key(|&(i, j)| (a[i][j].abs(), i, j));
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                let q = a[i][t].div_euclid(a[t][t]);
                if q != 0 {
                    for j in t..cols {
                        a[i][j] -= q * a[t][j];
                    }
                }
                if a[i][t] != 0 {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                let q = a[t][j].div_euclid(a[t][t]);
                if q != 0 {
                    for row in a.iter_mut().skip(t) {
                        row[j] -= q * row[t];
                    }
                }
                if a[t][j] != 0 {
                    clean = false;
                }
            }
            if clean {
                // divisibility: fold any entry not divisible by the pivot into row t
                let bad = (t + 1..rows)
                    .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                    .find(|&(i, j)| a[i][j] % a[t][t] != 0);
                match bad {
                    Some((i, _)) => {
                        for j in t..cols {
                            a[t][j] += a[i][j];
                        }
                    }
                    None => break,
                }
            }
            // move the smallest nonzero entry of row t / column t to the pivot
            let small = (t..rows)
                .map(|i| (i, t))
                .chain((t..cols).map(|j| (t, j)))
                .filter(|&(i, j)| a[i][j] != 0)
                .min_by_key(|&(i, j)| (a[i][j].abs(), i, j))
                .expect("pivot is nonzero");
            a.swap(t, small.0);
            for row in a.iter_mut() {
                row.swap(t, small.1);
            }
        }
        diag.push(a[t][t].abs() as i64);
        t += 1;
    }
    diag
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_examples() {
        assert_eq!(smith_diagonal(&[vec![0, 0], vec![0, 0]]), Vec::<i64>::new());
        assert_eq!(smith_diagonal(&[vec![3]]), vec![3]);
        assert_eq!(smith_diagonal(&[vec![2, 0], vec![0, 3]]), vec![1, 6]);
        assert_eq!(smith_diagonal(&[vec![0, 0, 0], vec![0, 2, -1]]), vec![1]);
        assert_eq!(smith_diagonal(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]), vec![2, 6, 12]);
    }

    #[test]
    fn divisibility_chain() {
        let d = smith_diagonal(&[vec![4, 0, 0], vec![0, 6, 0], vec![0, 0, 10]]);
        assert_eq!(d, vec![2, 2, 60]);
        assert!(d.windows(2).all(|w| w[1] % w[0] == 0));
    }
}
