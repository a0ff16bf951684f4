//! Index bookkeeping for alternating forms: increasing index tuples and signed permutations.

/// All strictly increasing `q`-tuples drawn from `0..d`, in lexicographic order.
pub fn increasing_tuples(d: usize, q: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if q > d {
        return out;
    }
    let mut current: Vec<usize> = (0..q).collect();
    loop {
        out.push(current.clone());
        // advance to the next combination
        let mut i = q;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] < d - q + i {
                current[i] += 1;
                for j in i + 1..q {
                    current[j] = current[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Position of a strictly increasing tuple in the order produced by [`increasing_tuples`].
pub fn tuple_rank(d: usize, tuple: &[usize]) -> usize {
    let q = tuple.len();
    let mut rank = 0;
    let mut start = 0;
    for (j, &v) in tuple.iter().enumerate() {
        for skipped in start..v {
            rank += binomial(d - 1 - skipped, q - 1 - j);
        }
        start = v + 1;
    }
    rank
}

/// Sorts `indices`, returning the permutation sign, or `None` when an index repeats.
pub fn sort_with_sign(indices: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut v = indices.to_vec();
    let mut sign = 1.0;
    // insertion sort counts transpositions
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, sign))
    }
}

/// Every permutation of `0..k` with its sign.
pub fn signed_permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
    fn recurse(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                recurse(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut perms = Vec::new();
    recurse(&mut Vec::new(), &mut vec![false; k], &mut perms);
    perms
        .into_iter()
        .map(|p| {
            let sign = sort_with_sign(&p).map(|(_, s)| s).unwrap_or(0.0);
            (p, sign)
        })
        .collect()
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuples_and_ranks_agree() {
        for d in 0..7 {
            for q in 0..=d {
                let tuples = increasing_tuples(d, q);
                assert_eq!(tuples.len(), binomial(d, q));
                for (i, t) in tuples.iter().enumerate() {
                    assert_eq!(tuple_rank(d, t), i);
                }
            }
        }
    }

    #[test]
    fn permutation_signs() {
        let perms = signed_permutations(3);
        assert_eq!(perms.len(), 6);
        let total: f64 = perms.iter().map(|(_, s)| s).sum();
        assert_eq!(total, 0.0);
        assert_eq!(sort_with_sign(&[2, 0, 1]), Some((vec![0, 1, 2], 1.0)));
        assert_eq!(sort_with_sign(&[1, 0]), Some((vec![0, 1], -1.0)));
        assert_eq!(sort_with_sign(&[1, 1]), None);
    }
}
