//! Go 9x9 under Tromp-Taylor rules: area scoring, positional superko over
//! board-only hashes, suicide forbidden.
//!
//! The board is stored padded to 11x11 so neighbour lookups never bounds
//! check. Groups keep a circular stone list and pseudo-liberty sums, which
//! give O(1) atari detection: a group is in atari iff all of its
//! pseudo-liberties are the same point, i.e. `libs * sum_sq == sum^2`.

use std::collections::HashSet;
use std::fmt;
use std::hash::{BuildHasherDefault, Hasher};
use std::str::FromStr;

use super::{Game, GameError, Player};

pub const BOARD_SIZE: usize = 9;
pub const BOARD_POINTS: usize = BOARD_SIZE * BOARD_SIZE;
/// Dense id of the pass move.
pub const PASS_INDEX: usize = BOARD_POINTS;
/// Number of distinct moves: every intersection plus pass.
pub const MOVE_COUNT: usize = BOARD_POINTS + 1;
pub const DEFAULT_KOMI: f64 = 7.5;
/// Hard ply cap, three times the board area.
pub const DEFAULT_MOVE_CAP: u32 = 3 * BOARD_POINTS as u32;

const WIDTH: usize = BOARD_SIZE + 2;
const PADDED: usize = WIDTH * WIDTH;

const EMPTY: u8 = 0;
const EDGE: u8 = 3;

const GTP_COLUMNS: &[u8; 9] = b"ABCDEFGHJ";

#[inline]
const fn stone(p: Player) -> u8 {
    match p {
        Player::Black => 1,
        Player::White => 2,
    }
}

#[inline]
const fn padded(id: usize) -> usize {
    (id / BOARD_SIZE + 1) * WIDTH + id % BOARD_SIZE + 1
}

#[inline]
const fn dense(pos: usize) -> usize {
    (pos / WIDTH - 1) * BOARD_SIZE + pos % WIDTH - 1
}

#[inline]
const fn neighbours(pos: usize) -> [usize; 4] {
    [pos - WIDTH, pos - 1, pos + 1, pos + WIDTH]
}

const fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

const ZOBRIST: [[u64; PADDED]; 2] = {
    let mut table = [[0u64; PADDED]; 2];
    let mut c = 0;
    while c < 2 {
        let mut p = 0;
        while p < PADDED {
            table[c][p] = splitmix64(((c * PADDED + p) as u64) << 8 | 0x5A);
            p += 1;
        }
        c += 1;
    }
    table
};

/// Identity hasher for already-random 64-bit position hashes.
#[derive(Default, Clone, Copy)]
pub struct PositionHasher(u64);

impl Hasher for PositionHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = self.0.rotate_left(8) ^ u64::from(b);
        }
    }

    fn write_u64(&mut self, n: u64) {
        self.0 = n;
    }
}

type History = HashSet<u64, BuildHasherDefault<PositionHasher>>;

/// A board intersection, row 0 being the first GTP row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point(u8);

impl Point {
    pub fn new(row: usize, col: usize) -> Option<Point> {
        (row < BOARD_SIZE && col < BOARD_SIZE).then(|| Point((row * BOARD_SIZE + col) as u8))
    }

    pub fn from_index(id: usize) -> Option<Point> {
        (id < BOARD_POINTS).then_some(Point(id as u8))
    }

    pub fn row(self) -> usize {
        self.0 as usize / BOARD_SIZE
    }

    pub fn col(self) -> usize {
        self.0 as usize % BOARD_SIZE
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", GTP_COLUMNS[self.col()] as char, self.row() + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    Play(Point),
    Pass,
}

impl Move {
    /// Convenience constructor; panics on off-board coordinates.
    pub fn at(row: usize, col: usize) -> Move {
        Move::Play(Point::new(row, col).expect("on-board coordinates"))
    }

    /// Dense id: `9 * row + col` for points, 81 for pass.
    pub fn index(self) -> usize {
        match self {
            Move::Play(p) => p.index(),
            Move::Pass => PASS_INDEX,
        }
    }

    pub fn from_index(id: usize) -> Option<Move> {
        match id {
            PASS_INDEX => Some(Move::Pass),
            _ => Point::from_index(id).map(Move::Play),
        }
    }
}

/// Dense move id of a move.
pub fn move_index(mv: Move) -> usize {
    mv.index()
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Play(p) => p.fmt(f),
            Move::Pass => f.write_str("pass"),
        }
    }
}

impl FromStr for Move {
    type Err = GameError;

    /// Parses GTP vertices ("A1".."J9", no "I") and "pass", case-insensitive.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("pass") {
            return Ok(Move::Pass);
        }
        let bad = || GameError::Parse(format!("bad vertex {s:?}"));
        let mut chars = s.chars();
        let letter = chars.next().ok_or_else(bad)?.to_ascii_uppercase();
        let col = GTP_COLUMNS.iter().position(|&c| c as char == letter).ok_or_else(bad)?;
        let row: usize = chars.as_str().parse().map_err(|_| bad())?;
        if row == 0 {
            return Err(bad());
        }
        Point::new(row - 1, col).map(Move::Play).ok_or_else(bad)
    }
}

/// Area count of a position.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GameOutcome {
    pub black_area: u32,
    pub white_area: u32,
    pub komi: f64,
}

impl GameOutcome {
    /// Black wins iff `black_area - white_area > komi`.
    pub fn winner(&self) -> Option<Player> {
        let margin = f64::from(self.black_area) - f64::from(self.white_area);
        if margin > self.komi {
            Some(Player::Black)
        } else if margin < self.komi {
            Some(Player::White)
        } else {
            None
        }
    }

    /// 1 to the winner, 0 to the loser, 1/2 each on a draw.
    pub fn reward(&self, player: Player) -> f64 {
        match self.winner() {
            Some(w) if w == player => 1.0,
            Some(_) => 0.0,
            None => 0.5,
        }
    }
}

/// Result of checking a stone placement before committing it.
struct Placement {
    new_hash: u64,
}

/// A full Go position. Cloning yields an independent value.
#[derive(Clone)]
pub struct GoState {
    cells: [u8; PADDED],
    head: [u8; PADDED],
    next: [u8; PADDED],
    size: [u8; PADDED],
    libs: [u16; PADDED],
    lib_sum: [u32; PADDED],
    lib_sq: [u32; PADDED],
    group_hash: [u64; PADDED],
    empties: [u8; BOARD_POINTS],
    empty_slot: [u8; BOARD_POINTS],
    n_empty: u8,
    hash: u64,
    history: History,
    to_move: Player,
    passes: u8,
    ply: u32,
    move_cap: u32,
    komi: f64,
}

impl Default for GoState {
    fn default() -> Self {
        GoState::new()
    }
}

impl GoState {
    /// Empty board, Black to move, komi 7.5, ply cap 243.
    pub fn new() -> GoState {
        let mut cells = [EDGE; PADDED];
        let mut empties = [0u8; BOARD_POINTS];
        let mut empty_slot = [0u8; BOARD_POINTS];
        for id in 0..BOARD_POINTS {
            cells[padded(id)] = EMPTY;
            empties[id] = id as u8;
            empty_slot[id] = id as u8;
        }
        let mut history = History::default();
        history.insert(0);
        GoState {
            cells,
            head: [0; PADDED],
            next: [0; PADDED],
            size: [0; PADDED],
            libs: [0; PADDED],
            lib_sum: [0; PADDED],
            lib_sq: [0; PADDED],
            group_hash: [0; PADDED],
            empties,
            empty_slot,
            n_empty: BOARD_POINTS as u8,
            hash: 0,
            history,
            to_move: Player::Black,
            passes: 0,
            ply: 0,
            move_cap: DEFAULT_MOVE_CAP,
            komi: DEFAULT_KOMI,
        }
    }

    pub fn with_komi(mut self, komi: f64) -> GoState {
        self.komi = komi;
        self
    }

    pub fn with_move_cap(mut self, cap: u32) -> GoState {
        self.move_cap = cap;
        self
    }

    /// Builds a position from a diagram of 9 rows, top row first (GTP row 9).
    /// `X` is Black, `O` is White, `.` or `+` empty; whitespace is ignored.
    /// Fails if any group would have no liberties.
    pub fn from_diagram(diagram: &str, to_move: Player) -> Result<GoState, GameError> {
        let rows: Vec<Vec<char>> = diagram
            .lines()
            .map(|l| l.chars().filter(|c| !c.is_whitespace()).collect::<Vec<_>>())
            .filter(|r| !r.is_empty())
            .collect();
        if rows.len() != BOARD_SIZE || rows.iter().any(|r| r.len() != BOARD_SIZE) {
            return Err(GameError::Parse("diagram must be 9 rows of 9 cells".into()));
        }
        let mut state = GoState::new();
        for (i, row) in rows.iter().enumerate() {
            for (col, &ch) in row.iter().enumerate() {
                let owner = match ch {
                    'X' | 'x' | 'B' | 'b' => Player::Black,
                    'O' | 'o' | 'W' | 'w' => Player::White,
                    '.' | '+' => continue,
                    _ => return Err(GameError::Parse(format!("bad diagram cell {ch:?}"))),
                };
                let id = (BOARD_SIZE - 1 - i) * BOARD_SIZE + col;
                state.place_raw(padded(id), owner, false);
            }
        }
        for id in 0..BOARD_POINTS {
            let p = padded(id);
            if state.cells[p] != EMPTY && state.libs[state.head[p] as usize] == 0 {
                return Err(GameError::Parse(format!(
                    "group at {} has no liberties",
                    Point(id as u8)
                )));
            }
        }
        state.history.clear();
        state.history.insert(state.hash);
        state.to_move = to_move;
        Ok(state)
    }

    pub fn to_move(&self) -> Player {
        self.to_move
    }

    /// Overrides the side to move (GTP allows either colour to play).
    pub fn set_to_move(&mut self, player: Player) {
        self.to_move = player;
    }

    pub fn ply(&self) -> u32 {
        self.ply
    }

    pub fn consecutive_passes(&self) -> u32 {
        u32::from(self.passes)
    }

    pub fn komi(&self) -> f64 {
        self.komi
    }

    pub fn set_komi(&mut self, komi: f64) {
        self.komi = komi;
    }

    pub fn move_cap(&self) -> u32 {
        self.move_cap
    }

    /// Board-only Zobrist hash; also the key used for superko.
    pub fn position_hash(&self) -> u64 {
        self.hash
    }

    pub fn history_len(&self) -> usize {
        self.history.len()
    }

    pub fn stone_at(&self, point: Point) -> Option<Player> {
        match self.cells[padded(point.index())] {
            1 => Some(Player::Black),
            2 => Some(Player::White),
            _ => None,
        }
    }

    pub fn stone_count(&self, player: Player) -> usize {
        let s = stone(player);
        (0..BOARD_POINTS).filter(|&id| self.cells[padded(id)] == s).count()
    }

    /// Two consecutive passes, or the ply cap reached.
    pub fn is_terminal(&self) -> bool {
        self.passes >= 2 || self.ply >= self.move_cap
    }

    /// All legal moves. Pass is always included.
    pub fn legal_moves(&self) -> Vec<Move> {
        let mut out: Vec<Move> = (0..BOARD_POINTS)
            .filter(|&id| self.check_placement(padded(id), self.to_move).is_some())
            .map(|id| Move::Play(Point(id as u8)))
            .collect();
        out.push(Move::Pass);
        out
    }

    pub fn is_legal(&self, mv: Move) -> bool {
        if self.is_terminal() {
            return false;
        }
        match mv {
            Move::Pass => true,
            Move::Play(p) => self.check_placement(padded(p.index()), self.to_move).is_some(),
        }
    }

    /// Plays `mv` in place.
    pub fn play_move(&mut self, mv: Move) -> Result<(), GameError> {
        if self.is_terminal() {
            return Err(GameError::IllegalMove(format!("{mv} after game end")));
        }
        match mv {
            Move::Pass => {
                self.passes += 1;
            }
            Move::Play(p) => {
                let pos = padded(p.index());
                let placement = self
                    .check_placement(pos, self.to_move)
                    .ok_or_else(|| GameError::IllegalMove(mv.to_string()))?;
                self.place_raw(pos, self.to_move, true);
                debug_assert_eq!(self.hash, placement.new_hash);
                self.history.insert(self.hash);
                self.passes = 0;
            }
        }
        self.to_move = self.to_move.opponent();
        self.ply += 1;
        Ok(())
    }

    /// Returns the position after `mv`, leaving `self` untouched.
    pub fn apply_move(&self, mv: Move) -> Result<GoState, GameError> {
        let mut next = self.clone();
        next.play_move(mv)?;
        Ok(next)
    }

    /// Tromp-Taylor score of a finished game.
    pub fn score(&self) -> Result<GameOutcome, GameError> {
        if !self.is_terminal() {
            return Err(GameError::NotTerminal);
        }
        Ok(self.area_score())
    }

    /// Tromp-Taylor area count of the position as it stands: stones plus
    /// empty regions that reach only one colour.
    pub fn area_score(&self) -> GameOutcome {
        let mut area = [0u32; 3];
        let mut seen = [false; PADDED];
        let mut stack: Vec<usize> = Vec::with_capacity(BOARD_POINTS);
        for id in 0..BOARD_POINTS {
            let p = padded(id);
            match self.cells[p] {
                EMPTY if !seen[p] => {
                    let mut region = 0u32;
                    let mut reach = 0u8;
                    seen[p] = true;
                    stack.push(p);
                    while let Some(x) = stack.pop() {
                        region += 1;
                        for q in neighbours(x) {
                            match self.cells[q] {
                                EMPTY if !seen[q] => {
                                    seen[q] = true;
                                    stack.push(q);
                                }
                                1 => reach |= 1,
                                2 => reach |= 2,
                                _ => {}
                            }
                        }
                    }
                    if reach == 1 || reach == 2 {
                        area[reach as usize] += region;
                    }
                }
                EMPTY => {}
                s => area[s as usize] += 1,
            }
        }
        GameOutcome {
            black_area: area[1],
            white_area: area[2],
            komi: self.komi,
        }
    }

    /// True if `point` is surrounded on all four sides by `player`'s stones
    /// or the board edge.
    pub fn is_own_eye(&self, point: Point, player: Player) -> bool {
        let pos = padded(point.index());
        let s = stone(player);
        self.cells[pos] == EMPTY
            && neighbours(pos)
                .iter()
                .all(|&q| self.cells[q] == s || self.cells[q] == EDGE)
    }

    /// Recomputes groups, liberties and the hash from scratch and compares
    /// them with the incremental bookkeeping.
    pub fn validate(&self) -> Result<(), String> {
        let mut seen = [false; PADDED];
        let mut hash = 0u64;
        let mut empties = 0usize;
        for id in 0..BOARD_POINTS {
            let p = padded(id);
            let s = self.cells[p];
            if s == EMPTY {
                empties += 1;
                if self.empties[self.empty_slot[id] as usize] as usize != id {
                    return Err(format!("empty list out of sync at {}", Point(id as u8)));
                }
                continue;
            }
            hash ^= ZOBRIST[s as usize - 1][p];
            if seen[p] {
                continue;
            }
            let mut stones = vec![p];
            let mut liberties = HashSet::new();
            let mut pseudo = (0u32, 0u32, 0u32);
            seen[p] = true;
            let mut i = 0;
            while i < stones.len() {
                let x = stones[i];
                i += 1;
                for q in neighbours(x) {
                    if self.cells[q] == EMPTY {
                        liberties.insert(q);
                        pseudo.0 += 1;
                        pseudo.1 += q as u32;
                        pseudo.2 += (q * q) as u32;
                    } else if self.cells[q] == s && !seen[q] {
                        seen[q] = true;
                        stones.push(q);
                    }
                }
            }
            if liberties.is_empty() {
                return Err(format!("group at {} has no liberties", Point(id as u8)));
            }
            let h = self.head[p] as usize;
            if stones.iter().any(|&x| self.head[x] as usize != h) {
                return Err(format!("group at {} has mixed heads", Point(id as u8)));
            }
            if usize::from(self.size[h]) != stones.len() {
                return Err(format!("group at {} has wrong size", Point(id as u8)));
            }
            let got = (u32::from(self.libs[h]), self.lib_sum[h], self.lib_sq[h]);
            if got != pseudo {
                return Err(format!(
                    "group at {}: pseudo-liberties {got:?} expected {pseudo:?}",
                    Point(id as u8)
                ));
            }
            let mut x = h;
            let mut count = 0;
            loop {
                count += 1;
                x = self.next[x] as usize;
                if x == h || count > stones.len() {
                    break;
                }
            }
            if count != stones.len() {
                return Err(format!("group at {} has a broken stone list", Point(id as u8)));
            }
        }
        if hash != self.hash {
            return Err("incremental hash differs from recomputed hash".into());
        }
        if empties != usize::from(self.n_empty) {
            return Err("empty count out of sync".into());
        }
        if !self.history.contains(&self.hash) {
            return Err("current position missing from history".into());
        }
        Ok(())
    }

    #[inline]
    fn in_atari_at(&self, head: usize, pos: usize) -> bool {
        let libs = u64::from(self.libs[head]);
        let sum = u64::from(self.lib_sum[head]);
        libs > 0 && libs * u64::from(self.lib_sq[head]) == sum * sum && sum / libs == pos as u64
    }

    /// Legality test for a stone of `player` at padded `pos`.
    fn check_placement(&self, pos: usize, player: Player) -> Option<Placement> {
        if self.cells[pos] != EMPTY {
            return None;
        }
        let own = stone(player);
        let mut has_liberty = false;
        let mut captured = [0usize; 4];
        let mut n_captured = 0;
        for q in neighbours(pos) {
            match self.cells[q] {
                EMPTY => has_liberty = true,
                EDGE => {}
                s => {
                    let h = self.head[q] as usize;
                    let atari = self.in_atari_at(h, pos);
                    if s == own {
                        has_liberty |= !atari;
                    } else if atari && !captured[..n_captured].contains(&h) {
                        captured[n_captured] = h;
                        n_captured += 1;
                    }
                }
            }
        }
        if !has_liberty && n_captured == 0 {
            return None;
        }
        let mut new_hash = self.hash ^ ZOBRIST[player.index()][pos];
        for &h in &captured[..n_captured] {
            new_hash ^= self.group_hash[h];
        }
        if self.history.contains(&new_hash) {
            return None;
        }
        Some(Placement { new_hash })
    }

    #[inline]
    fn add_lib(&mut self, head: usize, lib: usize) {
        self.libs[head] += 1;
        self.lib_sum[head] += lib as u32;
        self.lib_sq[head] += (lib * lib) as u32;
    }

    #[inline]
    fn remove_lib(&mut self, head: usize, lib: usize) {
        self.libs[head] -= 1;
        self.lib_sum[head] -= lib as u32;
        self.lib_sq[head] -= (lib * lib) as u32;
    }

    fn remove_empty(&mut self, id: usize) {
        let slot = self.empty_slot[id] as usize;
        let last = self.n_empty as usize - 1;
        let moved = self.empties[last];
        self.empties[slot] = moved;
        self.empty_slot[moved as usize] = slot as u8;
        self.n_empty -= 1;
    }

    fn push_empty(&mut self, id: usize) {
        let slot = self.n_empty as usize;
        self.empties[slot] = id as u8;
        self.empty_slot[id] = slot as u8;
        self.n_empty += 1;
    }

    /// Places a stone, merges groups and, if `captures` is set, removes
    /// opponent groups left without liberties. Does not check legality or
    /// touch move counters.
    fn place_raw(&mut self, pos: usize, player: Player, captures: bool) {
        let own = stone(player);
        let opp = stone(player.opponent());
        self.cells[pos] = own;
        self.head[pos] = pos as u8;
        self.next[pos] = pos as u8;
        self.size[pos] = 1;
        self.libs[pos] = 0;
        self.lib_sum[pos] = 0;
        self.lib_sq[pos] = 0;
        self.group_hash[pos] = ZOBRIST[player.index()][pos];
        self.hash ^= ZOBRIST[player.index()][pos];
        self.remove_empty(dense(pos));

        let nbrs = neighbours(pos);
        for q in nbrs {
            match self.cells[q] {
                EMPTY => self.add_lib(pos, q),
                EDGE => {}
                _ => {
                    let h = self.head[q] as usize;
                    self.remove_lib(h, pos);
                }
            }
        }
        for q in nbrs {
            if self.cells[q] == own {
                let a = self.head[pos] as usize;
                let b = self.head[q] as usize;
                if a != b {
                    self.merge(a, b);
                }
            }
        }
        if !captures {
            return;
        }
        for q in nbrs {
            if self.cells[q] == opp {
                let h = self.head[q] as usize;
                if self.libs[h] == 0 {
                    self.capture(h);
                }
            }
        }
    }

    fn merge(&mut self, a: usize, b: usize) {
        let (keep, gone) = if self.size[a] >= self.size[b] { (a, b) } else { (b, a) };
        let mut x = gone;
        loop {
            self.head[x] = keep as u8;
            x = self.next[x] as usize;
            if x == gone {
                break;
            }
        }
        self.next.swap(keep, gone);
        self.size[keep] += self.size[gone];
        self.libs[keep] += self.libs[gone];
        self.lib_sum[keep] += self.lib_sum[gone];
        self.lib_sq[keep] += self.lib_sq[gone];
        self.group_hash[keep] ^= self.group_hash[gone];
    }

    fn capture(&mut self, head: usize) {
        let mut x = head;
        loop {
            self.cells[x] = EMPTY;
            self.push_empty(dense(x));
            x = self.next[x] as usize;
            if x == head {
                break;
            }
        }
        loop {
            for q in neighbours(x) {
                let s = self.cells[q];
                if s != EMPTY && s != EDGE {
                    let h = self.head[q] as usize;
                    self.add_lib(h, x);
                }
            }
            x = self.next[x] as usize;
            if x == head {
                break;
            }
        }
        self.hash ^= self.group_hash[head];
    }
}

/// Initial empty-board position.
pub fn initial_state() -> GoState {
    GoState::new()
}

impl fmt::Debug for GoState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GoState(ply {}, {} to move)\n{}", self.ply, self.to_move, self)
    }
}

impl fmt::Display for GoState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "  ")?;
        for &c in GTP_COLUMNS {
            write!(f, " {}", c as char)?;
        }
        writeln!(f)?;
        for row in (0..BOARD_SIZE).rev() {
            write!(f, "{:>2}", row + 1)?;
            for col in 0..BOARD_SIZE {
                let ch = match self.cells[padded(row * BOARD_SIZE + col)] {
                    1 => 'X',
                    2 => 'O',
                    _ => '.',
                };
                write!(f, " {ch}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl PartialEq for GoState {
    fn eq(&self, other: &Self) -> bool {
        self.cells == other.cells
            && self.to_move == other.to_move
            && self.passes == other.passes
            && self.ply == other.ply
            && self.hash == other.hash
            && self.history == other.history
    }
}

impl Game for GoState {
    const MOVE_COUNT: usize = MOVE_COUNT;

    fn to_move(&self) -> Player {
        self.to_move
    }

    fn ply(&self) -> u32 {
        self.ply
    }

    fn is_terminal(&self) -> bool {
        GoState::is_terminal(self)
    }

    fn candidate_moves(&self, out: &mut Vec<usize>) {
        out.extend(self.empties[..self.n_empty as usize].iter().map(|&id| id as usize));
        out.push(PASS_INDEX);
    }

    fn is_legal(&self, mv: usize) -> bool {
        if mv == PASS_INDEX {
            return !GoState::is_terminal(self);
        }
        mv < BOARD_POINTS && !GoState::is_terminal(self) && self.check_placement(padded(mv), self.to_move).is_some()
    }

    fn play(&mut self, mv: usize) -> Result<(), GameError> {
        let m = Move::from_index(mv).ok_or_else(|| GameError::IllegalMove(format!("id {mv}")))?;
        self.play_move(m)
    }

    fn playout_candidates(&self, out: &mut Vec<usize>) {
        out.extend(self.empties[..self.n_empty as usize].iter().map(|&id| id as usize));
    }

    fn is_playout_move(&self, mv: usize) -> bool {
        if mv >= BOARD_POINTS {
            return mv == PASS_INDEX;
        }
        let pos = padded(mv);
        let own = stone(self.to_move);
        let eye = neighbours(pos)
            .iter()
            .all(|&q| self.cells[q] == own || self.cells[q] == EDGE);
        !eye && self.check_placement(pos, self.to_move).is_some()
    }

    fn fallback_playout_move(&self) -> usize {
        PASS_INDEX
    }

    fn winner(&self) -> Option<Player> {
        self.area_score().winner()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn move_index_corners_and_pass() {
        assert_eq!(Move::at(0, 0).index(), 0);
        assert_eq!(Move::at(8, 8).index(), 80);
        assert_eq!(Move::Pass.index(), 81);
    }

    #[test]
    fn padded_dense_roundtrip() {
        for id in 0..BOARD_POINTS {
            assert_eq!(dense(padded(id)), id);
        }
    }

    #[test]
    fn gtp_vertices() {
        assert_eq!(Move::at(0, 0).to_string(), "A1");
        assert_eq!(Move::at(8, 8).to_string(), "J9");
        assert_eq!(Move::at(2, 7).to_string(), "H3");
        assert_eq!("j9".parse::<Move>().unwrap(), Move::at(8, 8));
        assert_eq!("PASS".parse::<Move>().unwrap(), Move::Pass);
        assert!("I5".parse::<Move>().is_err());
        assert!("A0".parse::<Move>().is_err());
        assert!("A10".parse::<Move>().is_err());
        assert!("".parse::<Move>().is_err());
    }

    #[test]
    fn initial_position() {
        let s = GoState::new();
        assert_eq!(s.legal_moves().len(), 82);
        assert!(!s.is_terminal());
        assert_eq!(s.to_move(), Player::Black);
        assert_eq!(s.stone_count(Player::Black) + s.stone_count(Player::White), 0);
        s.validate().unwrap();
    }

    #[test]
    fn pass_counts() {
        let s = GoState::new().apply_move(Move::Pass).unwrap();
        assert_eq!(s.consecutive_passes(), 1);
        assert_eq!(s.to_move(), Player::White);
        let s = s.apply_move(Move::Pass).unwrap();
        assert!(s.is_terminal());
        assert!(s.apply_move(Move::Pass).is_err());
    }

    #[test]
    fn score_requires_terminal() {
        assert_eq!(GoState::new().score(), Err(GameError::NotTerminal));
    }
}
