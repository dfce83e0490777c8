//! Generalized suffix array over token sequences, used to enumerate maximal
//! repeats.
//!
//! Sequences are concatenated with a distinct sentinel after each one, so no
//! common prefix crosses a sequence boundary. Repeats come from the LCP
//! intervals of the suffix array (right-maximal by construction) and are kept
//! when their occurrences are not all preceded by the same symbol.

/// All occurrences of one maximal repeat.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RepeatClass {
    pub len: usize,
    /// `(sequence, start)` pairs in ascending order.
    pub occurrences: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct SuffixIndex {
    text: Vec<u64>,
    /// `(sequence, offset)` of each text position; sentinels map to `None`.
    origin: Vec<Option<(usize, usize)>>,
    sa: Vec<usize>,
    lcp: Vec<usize>,
}

impl SuffixIndex {
    pub fn new(sequences: &[Vec<u32>]) -> Self {
        let mut text = Vec::new();
        let mut origin = Vec::new();
        for (s, seq) in sequences.iter().enumerate() {
            for (o, &t) in seq.iter().enumerate() {
                text.push(t as u64);
                origin.push(Some((s, o)));
            }
            text.push(u32::MAX as u64 + 1 + s as u64);
            origin.push(None);
        }
        let sa = suffix_array(&text);
        let lcp = kasai(&text, &sa);
        SuffixIndex { text, origin, sa, lcp }
    }

    pub fn len(&self) -> usize {
        self.text.len()
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    /// Maximal repeats of at least `min_len` symbols, sorted by length then
    /// occurrences.
    pub fn maximal_repeats(&self, min_len: usize) -> Vec<RepeatClass> {
        let min_len = min_len.max(1);
        let mut out = Vec::new();
        // stack of (lcp value, left bound)
        let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
        let n = self.sa.len();
        for i in 1..=n {
            let cur = if i < n { self.lcp[i] } else { 0 };
            let mut lb = i - 1;
            while stack.last().is_some_and(|&(h, _)| cur < h) {
                let (h, l) = stack.pop().unwrap();
                lb = l;
                if h >= min_len {
                    self.emit(h, l, i - 1, &mut out);
                }
            }
            if stack.last().is_none_or(|&(h, _)| cur > h) {
                stack.push((cur, lb));
            }
        }
        out.sort();
        out
    }

    fn emit(&self, len: usize, lb: usize, rb: usize, out: &mut Vec<RepeatClass>) {
        let suffixes = &self.sa[lb..=rb];
        let before = |p: usize| if p == 0 { None } else { Some(self.text[p - 1]) };
        let first = before(suffixes[0]);
        // a sequence start or a sentinel is unique context
        let left_maximal = first.is_none_or(|t| t > u32::MAX as u64)
            || suffixes.iter().any(|&p| before(p) != first);
        if !left_maximal {
            return;
        }
        let mut occurrences: Vec<(usize, usize)> = suffixes
            .iter()
            .map(|&p| self.origin[p].expect("repeats never start at a sentinel"))
            .collect();
        occurrences.sort_unstable();
        out.push(RepeatClass { len, occurrences });
    }
}

/// Prefix doubling.
fn suffix_array(text: &[u64]) -> Vec<usize> {
    let n = text.len();
    let mut sa: Vec<usize> = (0..n).collect();
    if n == 0 {
        return sa;
    }
    let mut rank: Vec<u64> = text.to_vec();
    let mut tmp = vec![0u64; n];
    let mut k = 1;
    loop {
        let key = |i: usize, rank: &[u64]| (rank[i], if i + k < n { rank[i + k] + 1 } else { 0 });
        sa.sort_unstable_by_key(|&i| key(i, &rank));
        tmp[sa[0]] = 0;
        for w in 1..n {
            tmp[sa[w]] = tmp[sa[w - 1]] + u64::from(key(sa[w], &rank) != key(sa[w - 1], &rank));
        }
        std::mem::swap(&mut rank, &mut tmp);
        if rank[sa[n - 1]] as usize == n - 1 {
            break;
        }
        k *= 2;
    }
    sa
}

/// `lcp[i]` = common prefix length of suffixes `sa[i-1]` and `sa[i]`.
fn kasai(text: &[u64], sa: &[usize]) -> Vec<usize> {
    let n = text.len();
    let mut rank = vec![0; n];
    for (i, &s) in sa.iter().enumerate() {
        rank[s] = i;
    }
    let mut lcp = vec![0; n];
    let mut h = 0;
    for i in 0..n {
        if rank[i] > 0 {
            let j = sa[rank[i] - 1];
            while i + h < n && j + h < n && text[i + h] == text[j + h] {
                h += 1;
            }
            lcp[rank[i]] = h;
            h = h.saturating_sub(1);
        } else {
            h = 0;
        }
    }
    lcp
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    /// Enumerates every n-gram and keeps the maximal ones.
    fn brute_force(seqs: &[Vec<u32>], min_len: usize) -> Vec<RepeatClass> {
        let mut out = Vec::new();
        let longest = seqs.iter().map(Vec::len).max().unwrap_or(0);
        for len in min_len.max(1)..=longest {
            let mut groups: BTreeMap<&[u32], Vec<(usize, usize)>> = BTreeMap::new();
            for (s, seq) in seqs.iter().enumerate() {
                for start in 0..seq.len().saturating_sub(len - 1) {
                    groups.entry(&seq[start..start + len]).or_default().push((s, start));
                }
            }
            for occ in groups.into_values().filter(|o| o.len() >= 2) {
                let ctx = |s: usize, p: Option<usize>| p.and_then(|p| seqs[s].get(p).copied());
                let lefts: Vec<_> = occ.iter().map(|&(s, st)| ctx(s, st.checked_sub(1))).collect();
                let rights: Vec<_> = occ.iter().map(|&(s, st)| ctx(s, Some(st + len))).collect();
                let diverse = |c: &[Option<u32>]| c.iter().any(|x| x.is_none()) || c.iter().any(|x| *x != c[0]);
                if diverse(&lefts) && diverse(&rights) {
                    out.push(RepeatClass { len, occurrences: occ });
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn suffix_array_sorts_suffixes() {
        let text: Vec<u64> = "banana".bytes().map(u64::from).collect();
        assert_eq!(suffix_array(&text), vec![5, 3, 1, 0, 4, 2]);
        assert_eq!(kasai(&text, &suffix_array(&text)), vec![0, 1, 3, 0, 0, 2]);
    }

    #[test]
    fn repeated_trigram_across_sentences() {
        // the club opened / the club opened early
        let seqs = vec![vec![0, 1, 2], vec![0, 1, 2, 3]];
        let reps = SuffixIndex::new(&seqs).maximal_repeats(2);
        assert_eq!(
            reps,
            vec![RepeatClass {
                len: 3,
                occurrences: vec![(0, 0), (1, 0)]
            }]
        );
    }

    #[test]
    fn no_repeats_no_classes() {
        let seqs = vec![vec![0, 1, 2], vec![3, 4]];
        assert!(SuffixIndex::new(&seqs).maximal_repeats(2).is_empty());
    }

    proptest! {
        #[test]
        fn matches_brute_force(
            seqs in prop::collection::vec(prop::collection::vec(0u32..3, 0..9), 1..5),
            min_len in 1usize..4,
        ) {
            let fast = SuffixIndex::new(&seqs).maximal_repeats(min_len);
            prop_assert_eq!(fast, brute_force(&seqs, min_len));
        }
    }
}
