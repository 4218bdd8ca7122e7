//! Deterministic enumeration of small codes for exhaustive checks.

use std::collections::{BTreeMap, HashSet};

use crate::code::{CodeKind, LinkCode, Passage, Sign, Token};

/// Every perfect matching of `2n` points as a label word, labels numbered
/// by first appearance.
pub fn chord_words(n: usize) -> Vec<Vec<u32>> {
    fn go(word: &mut Vec<u32>, next: u32, out: &mut Vec<Vec<u32>>) {
        let Some(first) = word.iter().position(|&x| x == 0) else {
            out.push(word.clone());
            return;
        };
        word[first] = next;
        for j in first + 1..word.len() {
            if word[j] == 0 {
                word[j] = next;
                go(word, next + 1, out);
                word[j] = 0;
            }
        }
        word[first] = 0;
    }
    let mut out = Vec::new();
    go(&mut vec![0; 2 * n], 1, &mut out);
    out
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Free codes with up to `max_crossings` crossings on exactly `circles`
/// circles, one per canonical class, in generation order.
pub fn free_codes(max_crossings: usize, circles: usize) -> Vec<LinkCode> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for n in 0..=max_crossings {
        for word in chord_words(n) {
            for comp in compositions(2 * n, circles) {
                let mut split = Vec::with_capacity(circles);
                let mut at = 0;
                for len in comp {
                    split.push(word[at..at + len].to_vec());
                    at += len;
                }
                let code = LinkCode::free(split).expect("matchings are valid codes");
                if seen.insert(code.canonical_form()) {
                    out.push(code);
                }
            }
        }
    }
    out
}

/// Codes without crossing-free circles, any number of circles: one per
/// canonical class, so every frame with up to `max_crossings` vertices
/// appears.
pub fn frame_codes(max_crossings: usize) -> Vec<LinkCode> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for n in 1..=max_crossings {
        let len = 2 * n;
        for word in chord_words(n) {
            // bit i set: a circle ends after position i
            for cuts in 0u32..(1 << (len - 1)) {
                let mut split = vec![Vec::new()];
                for (i, &l) in word.iter().enumerate() {
                    split.last_mut().expect("non-empty").push(l);
                    if i + 1 < len && cuts >> i & 1 == 1 {
                        split.push(Vec::new());
                    }
                }
                let code = LinkCode::free(split).expect("matchings are valid codes");
                if seen.insert(code.canonical_form()) {
                    out.push(code);
                }
            }
        }
    }
    out
}

/// Free knot codes with up to `max_chords` chords.
pub fn knot_codes(max_chords: usize) -> Vec<LinkCode> {
    free_codes(max_chords, 1)
}

/// Free codes on 1 to `max_circles` circles.
pub fn link_codes(max_crossings: usize, max_circles: usize) -> Vec<LinkCode> {
    (1..=max_circles).flat_map(|k| free_codes(max_crossings, k)).collect()
}

/// All virtual decorations of a free code: each crossing picks which
/// occurrence is over and a sign.
pub fn virtual_decorations(code: &LinkCode) -> Vec<LinkCode> {
    let labels = code.labels();
    let mut out = Vec::new();
    for mask in 0u64..(1 << (2 * labels.len())) {
        let mut over_first = BTreeMap::new();
        let mut signs = BTreeMap::new();
        for (i, &l) in labels.iter().enumerate() {
            over_first.insert(l, mask >> (2 * i) & 1 == 0);
            let s = if mask >> (2 * i + 1) & 1 == 0 { Sign::Positive } else { Sign::Negative };
            signs.insert(l, s);
        }
        let mut first_seen = HashSet::new();
        let circles = code
            .circles()
            .iter()
            .map(|c| {
                c.iter()
                    .map(|t| {
                        let first = first_seen.insert(t.label);
                        let over = first == over_first[&t.label];
                        Token {
                            label: t.label,
                            passage: Some(if over { Passage::Over } else { Passage::Under }),
                        }
                    })
                    .collect()
            })
            .collect();
        out.push(LinkCode::from_parts(CodeKind::Virtual, circles, signs).expect("decorations are valid"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_counts() {
        let counts: Vec<usize> = (0..6).map(|n| chord_words(n).len()).collect();
        assert_eq!(counts, [1, 1, 3, 15, 105, 945]);
    }

    #[test]
    fn small_knot_classes() {
        // chord diagrams up to rotation and reflection: 1, 1, 2, 5, 17
        let by_size: Vec<usize> = (0..=4)
            .map(|n| knot_codes(4).iter().filter(|c| c.crossing_count() == n).count())
            .collect();
        assert_eq!(by_size, [1, 1, 2, 5, 17]);
    }

    #[test]
    fn frames_cover_split_circles() {
        let fs = frame_codes(2);
        assert!(fs.iter().all(|c| c.circles().iter().all(|k| !k.is_empty())));
        let split = LinkCode::free(vec![vec![1], vec![1]]).unwrap();
        assert!(fs.iter().any(|c| c.equivalent_form(&split)));
        assert_eq!(fs.iter().filter(|c| c.num_circles() == 4).count(), 1);
    }

    #[test]
    fn decorations() {
        let c = LinkCode::free(vec![vec![1, 2, 1, 2]]).unwrap();
        let v = virtual_decorations(&c);
        assert_eq!(v.len(), 16);
        assert!(v.iter().all(|d| d.to_free() == c));
    }
}
