use serde::{Deserialize, Serialize};

use crate::alphabet::Letter;

/// Head movement of a transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    Left,
    Right,
}

impl Direction {
    pub fn symbol(self) -> char {
        match self {
            Direction::Left => 'L',
            Direction::Right => 'R',
        }
    }

    pub fn from_symbol(s: &str) -> Option<Direction> {
        match s {
            "L" => Some(Direction::Left),
            "R" => Some(Direction::Right),
            _ => None,
        }
    }
}

/// Two-sided unbounded tape. Unwritten cells read as the blank (`Letter(0)`).
///
/// Cells at position `p >= 0` live in `right[p]`, cells at `p < 0` in
/// `left[-p - 1]`.
#[derive(Clone, Debug, Default)]
pub struct Tape {
    left: Vec<Letter>,
    right: Vec<Letter>,
    head: i64,
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn head(&self) -> i64 {
        self.head
    }

    pub fn read_at(&self, pos: i64) -> Letter {
        let cell = if pos >= 0 { self.right.get(pos as usize) } else { self.left.get((-pos - 1) as usize) };
        cell.copied().unwrap_or(Letter::BLANK)
    }

    #[inline]
    pub fn read(&self) -> Letter {
        self.read_at(self.head)
    }

    pub fn write_at(&mut self, pos: i64, l: Letter) {
        let (side, idx) =
            if pos >= 0 { (&mut self.right, pos as usize) } else { (&mut self.left, (-pos - 1) as usize) };
        if idx >= side.len() {
            if l == Letter::BLANK {
                return;
            }
            side.resize(idx + 1, Letter::BLANK);
        }
        side[idx] = l;
    }

    #[inline]
    pub fn write(&mut self, l: Letter) {
        self.write_at(self.head, l)
    }

    #[inline]
    pub fn shift(&mut self, d: Direction) {
        match d {
            Direction::Left => self.head -= 1,
            Direction::Right => self.head += 1,
        }
    }

    /// Leftmost and rightmost non-blank positions, if any cell is non-blank.
    pub fn extent(&self) -> Option<(i64, i64)> {
        let lo_left = self.left.iter().rposition(|&l| l != Letter::BLANK).map(|i| -(i as i64) - 1);
        let lo_right = self.right.iter().position(|&l| l != Letter::BLANK).map(|i| i as i64);
        let hi_right = self.right.iter().rposition(|&l| l != Letter::BLANK).map(|i| i as i64);
        let hi_left = self.left.iter().position(|&l| l != Letter::BLANK).map(|i| -(i as i64) - 1);
        let lo = lo_left.or(lo_right)?;
        let hi = hi_right.or(hi_left)?;
        Some((lo, hi))
    }
}

/// Tapes compare by content and head position; trailing blanks are ignored.
impl PartialEq for Tape {
    fn eq(&self, other: &Self) -> bool {
        if self.head != other.head {
            return false;
        }
        fn same(a: &[Letter], b: &[Letter]) -> bool {
            let n = a.len().max(b.len());
            (0..n).all(|i| a.get(i).unwrap_or(&Letter::BLANK) == b.get(i).unwrap_or(&Letter::BLANK))
        }
        same(&self.left, &other.left) && same(&self.right, &other.right)
    }
}

impl Eq for Tape {}
