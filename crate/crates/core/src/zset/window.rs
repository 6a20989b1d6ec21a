use serde::{Deserialize, Serialize};

/// Windows at or below this bound get a dense bitmap for O(1) membership.
const BITMAP_LIMIT: u64 = 1 << 27;

/// Dense bit set over `[0, len)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Bitmap {
    words: Vec<u64>,
    len: u64,
}

impl Bitmap {
    pub(crate) fn new(len: u64) -> Self {
        Bitmap { words: vec![0; len.div_ceil(64) as usize], len }
    }

    pub(crate) fn set(&mut self, n: u64) {
        self.words[(n / 64) as usize] |= 1 << (n % 64);
    }

    #[inline]
    pub(crate) fn get(&self, n: u64) -> bool {
        n < self.len && self.words[(n / 64) as usize] >> (n % 64) & 1 == 1
    }

    /// Bits `[start, start + len)` packed little-endian into words.
    pub(crate) fn extract(&self, start: u64, len: u64) -> Vec<u64> {
        let mut out = vec![0u64; len.div_ceil(64) as usize];
        let shift = start % 64;
        let first = (start / 64) as usize;
        for (i, slot) in out.iter_mut().enumerate() {
            let lo = self.words.get(first + i).copied().unwrap_or(0);
            let word = if shift == 0 {
                lo
            } else {
                let hi = self.words.get(first + i + 1).copied().unwrap_or(0);
                (lo >> shift) | (hi << (64 - shift))
            };
            *slot = word;
        }
        let tail = len % 64;
        if tail != 0 {
            if let Some(last) = out.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        out
    }
}

/// `S ∩ [0, bound)` as a sorted element list.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(from = "RawWindow", into = "RawWindow")]
pub struct WindowSet {
    bound: u64,
    elements: Vec<u64>,
    bitmap: Option<Bitmap>,
}

#[derive(Serialize, Deserialize)]
struct RawWindow {
    bound: u64,
    elements: Vec<u64>,
}

impl From<RawWindow> for WindowSet {
    fn from(raw: RawWindow) -> Self {
        let mut elements = raw.elements;
        elements.retain(|&x| x < raw.bound);
        elements.sort_unstable();
        elements.dedup();
        WindowSet::from_sorted(raw.bound, elements)
    }
}

impl From<WindowSet> for RawWindow {
    fn from(w: WindowSet) -> Self {
        RawWindow { bound: w.bound, elements: w.elements }
    }
}

impl PartialEq for WindowSet {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.elements == other.elements
    }
}

impl Eq for WindowSet {}

impl WindowSet {
    /// `elements` must be strictly increasing and below `bound`.
    pub(crate) fn from_sorted(bound: u64, elements: Vec<u64>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(elements.last().map_or(true, |&m| m < bound));
        let bitmap = (bound <= BITMAP_LIMIT).then(|| {
            let mut b = Bitmap::new(bound);
            for &x in &elements {
                b.set(x);
            }
            b
        });
        WindowSet { bound, elements, bitmap }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<u64> {
        self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Membership for `n < bound`; always `false` at or above the bound.
    #[inline]
    pub fn contains(&self, n: u64) -> bool {
        match &self.bitmap {
            Some(b) => b.get(n),
            None => n < self.bound && self.elements.binary_search(&n).is_ok(),
        }
    }

    /// Number of elements in `[lo, hi)`.
    pub fn count_range(&self, lo: u64, hi: u64) -> usize {
        let a = self.elements.partition_point(|&x| x < lo);
        let b = self.elements.partition_point(|&x| x < hi);
        b.saturating_sub(a)
    }

    /// Elements at or above `lo`.
    pub fn from_index_at_least(&self, lo: u64) -> &[u64] {
        &self.elements[self.elements.partition_point(|&x| x < lo)..]
    }

    pub(crate) fn bitmap(&self) -> Option<&Bitmap> {
        self.bitmap.as_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extract_crosses_word_boundaries() {
        let mut b = Bitmap::new(200);
        for n in [3, 63, 64, 65, 130] {
            b.set(n);
        }
        let w = b.extract(62, 5);
        // bits 62..67 -> positions 1 (63), 2 (64), 3 (65)
        assert_eq!(w, vec![0b01110]);
        let w = b.extract(3, 128);
        assert_eq!(w[0] & 1, 1);
        assert_eq!(w[0] >> 60 & 0b111, 0b111);
        assert_eq!(w[1] >> (127 - 64), 1);
    }

    #[test]
    fn window_membership_and_counts() {
        let w = WindowSet::from_sorted(20, vec![2, 4, 8, 16]);
        assert!(w.contains(8));
        assert!(!w.contains(9));
        assert!(!w.contains(32));
        assert_eq!(w.count_range(3, 17), 3);
        assert_eq!(w.from_index_at_least(5), &[8, 16]);
    }
}
