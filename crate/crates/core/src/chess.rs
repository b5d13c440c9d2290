//! FEN parsing, static chess relation extraction and the analogy battery.
//!
//! Relations are positional: side to move, castling and en passant are
//! ignored. Five relation types are extracted:
//!
//! * `attack`: `p -> q` when `p` could capture enemy `q` by move geometry
//!   (sliders stop at the first occupant, pawns capture diagonally).
//! * `defense`: the same geometry landing on a friendly piece.
//! * `blocking`: `q -> p` when friendly `q` is the first occupant on one of
//!   slider `p`'s rays (the blocker points at the piece it obstructs).
//! * `confinement`: `p -> q` for a piece `q` with zero legal moves, for
//!   every `p` that occupies one of `q`'s destination squares or, being an
//!   enemy of `q`, attacks one.
//! * `pinning`: `p -> q` when slider `p`'s ray meets enemy `q` and then the
//!   enemy king, with nothing else in between.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::ParseError;
use crate::matcher::{match_networks, MatchConfig};
use crate::relnet::{Entity, Relation, RelationTypeId, RelationalNetwork, TypeRegistry};

pub const ATTACK: RelationTypeId = RelationTypeId(0);
pub const DEFENSE: RelationTypeId = RelationTypeId(1);
pub const BLOCKING: RelationTypeId = RelationTypeId(2);
pub const CONFINEMENT: RelationTypeId = RelationTypeId(3);
pub const PINNING: RelationTypeId = RelationTypeId(4);

pub const CHESS_RELATIONS: [&str; 5] = ["attack", "defense", "blocking", "confinement", "pinning"];

/// The shared chess registry; every extracted network points at this one.
pub fn chess_registry() -> Arc<TypeRegistry> {
    static REG: std::sync::OnceLock<Arc<TypeRegistry>> = std::sync::OnceLock::new();
    REG.get_or_init(|| Arc::new(TypeRegistry::new(CHESS_RELATIONS).expect("static registry")))
        .clone()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub fn opponent(self) -> Color {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Color::White => "white",
            Color::Black => "black",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PieceKind {
    Pawn,
    Knight,
    Bishop,
    Rook,
    Queen,
    King,
}

impl PieceKind {
    fn letter(self) -> char {
        match self {
            PieceKind::Pawn => 'p',
            PieceKind::Knight => 'n',
            PieceKind::Bishop => 'b',
            PieceKind::Rook => 'r',
            PieceKind::Queen => 'q',
            PieceKind::King => 'k',
        }
    }

    fn from_letter(c: char) -> Option<PieceKind> {
        Some(match c.to_ascii_lowercase() {
            'p' => PieceKind::Pawn,
            'n' => PieceKind::Knight,
            'b' => PieceKind::Bishop,
            'r' => PieceKind::Rook,
            'q' => PieceKind::Queen,
            'k' => PieceKind::King,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            PieceKind::Pawn => "pawn",
            PieceKind::Knight => "knight",
            PieceKind::Bishop => "bishop",
            PieceKind::Rook => "rook",
            PieceKind::Queen => "queen",
            PieceKind::King => "king",
        }
    }

    fn directions(self) -> &'static [(i8, i8)] {
        const ORTHO: [(i8, i8); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
        const DIAG: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];
        const ALL: [(i8, i8); 8] = [
            (1, 0),
            (-1, 0),
            (0, 1),
            (0, -1),
            (1, 1),
            (1, -1),
            (-1, 1),
            (-1, -1),
        ];
        const KNIGHT: [(i8, i8); 8] = [
            (1, 2),
            (2, 1),
            (2, -1),
            (1, -2),
            (-1, -2),
            (-2, -1),
            (-2, 1),
            (-1, 2),
        ];
        match self {
            PieceKind::Rook => &ORTHO,
            PieceKind::Bishop => &DIAG,
            PieceKind::Queen | PieceKind::King => &ALL,
            PieceKind::Knight => &KNIGHT,
            PieceKind::Pawn => &[],
        }
    }

    fn is_slider(self) -> bool {
        matches!(self, PieceKind::Bishop | PieceKind::Rook | PieceKind::Queen)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Piece {
    pub color: Color,
    pub kind: PieceKind,
}

impl Piece {
    pub fn letter(self) -> char {
        let c = self.kind.letter();
        match self.color {
            Color::White => c.to_ascii_uppercase(),
            Color::Black => c,
        }
    }
}

/// Board square, `file + 8 * rank` with a1 = 0 and h8 = 63.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Square(u8);

impl Square {
    pub fn new(file: u8, rank: u8) -> Option<Square> {
        (file < 8 && rank < 8).then(|| Square(rank * 8 + file))
    }

    pub fn parse(name: &str) -> Option<Square> {
        let b = name.as_bytes();
        if b.len() != 2 {
            return None;
        }
        Square::new(b[0].wrapping_sub(b'a'), b[1].wrapping_sub(b'1'))
    }

    pub fn file(self) -> u8 {
        self.0 % 8
    }

    pub fn rank(self) -> u8 {
        self.0 / 8
    }

    fn offset(self, df: i8, dr: i8) -> Option<Square> {
        let f = self.file() as i8 + df;
        let r = self.rank() as i8 + dr;
        ((0..8).contains(&f) && (0..8).contains(&r)).then(|| Square((r * 8 + f) as u8))
    }

    fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", (b'a' + self.file()) as char, self.rank() + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChessPosition {
    board: [Option<Piece>; 64],
    pub side_to_move: Color,
}

impl ChessPosition {
    pub fn piece_at(&self, sq: Square) -> Option<Piece> {
        self.board[sq.index()]
    }

    /// Occupied squares in FEN order: rank 8 down to rank 1, file a to h.
    pub fn occupied(&self) -> Vec<(Square, Piece)> {
        let mut out = Vec::new();
        for rank in (0..8).rev() {
            for file in 0..8 {
                let sq = Square::new(file, rank).unwrap();
                if let Some(p) = self.piece_at(sq) {
                    out.push((sq, p));
                }
            }
        }
        out
    }

    pub fn piece_count(&self) -> usize {
        self.board.iter().filter(|p| p.is_some()).count()
    }

    pub fn king_square(&self, color: Color) -> Option<Square> {
        (0..64u8).map(Square).find(|s| {
            self.piece_at(*s)
                == Some(Piece {
                    color,
                    kind: PieceKind::King,
                })
        })
    }

    pub fn king_count(&self, color: Color) -> usize {
        self.board
            .iter()
            .flatten()
            .filter(|p| p.color == color && p.kind == PieceKind::King)
            .count()
    }

    /// Returns a copy with one square's piece replaced.
    pub fn with_piece(&self, sq: Square, piece: Option<Piece>) -> ChessPosition {
        let mut p = self.clone();
        p.board[sq.index()] = piece;
        p
    }

    /// Squares the piece on `sq` attacks (controls): slider rays up to and
    /// including the first occupant, jump squares, pawn capture diagonals.
    fn attacks_from(&self, sq: Square) -> Vec<Square> {
        let Some(piece) = self.piece_at(sq) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        match piece.kind {
            PieceKind::Pawn => {
                let dr = pawn_dir(piece.color);
                out.extend([sq.offset(-1, dr), sq.offset(1, dr)].into_iter().flatten());
            }
            PieceKind::Knight | PieceKind::King => {
                out.extend(
                    piece
                        .kind
                        .directions()
                        .iter()
                        .filter_map(|&(df, dr)| sq.offset(df, dr)),
                );
            }
            _ => {
                for &(df, dr) in piece.kind.directions() {
                    let mut cur = sq;
                    while let Some(next) = cur.offset(df, dr) {
                        out.push(next);
                        if self.piece_at(next).is_some() {
                            break;
                        }
                        cur = next;
                    }
                }
            }
        }
        out
    }

    fn is_attacked_by(&self, target: Square, color: Color) -> bool {
        (0..64u8).map(Square).any(|s| {
            self.piece_at(s).is_some_and(|p| p.color == color)
                && self.attacks_from(s).contains(&target)
        })
    }

    /// Geometric destination squares of the piece on `sq`: everything it
    /// attacks, plus pawn pushes. Both pawn capture diagonals count whether
    /// or not they are occupied.
    fn destinations(&self, sq: Square) -> Vec<Square> {
        let Some(piece) = self.piece_at(sq) else {
            return Vec::new();
        };
        if piece.kind != PieceKind::Pawn {
            return self.attacks_from(sq);
        }
        let dr = pawn_dir(piece.color);
        let mut out = Vec::new();
        if let Some(one) = sq.offset(0, dr) {
            out.push(one);
            let start_rank = if piece.color == Color::White { 1 } else { 6 };
            if sq.rank() == start_rank && self.piece_at(one).is_none() {
                if let Some(two) = sq.offset(0, 2 * dr) {
                    out.push(two);
                }
            }
        }
        out.extend([sq.offset(-1, dr), sq.offset(1, dr)].into_iter().flatten());
        out
    }

    /// Pseudo-legal target squares: destinations that are empty or hold an
    /// enemy. Pawns push onto empty squares and capture diagonally only.
    fn pseudo_moves(&self, sq: Square) -> Vec<Square> {
        let Some(piece) = self.piece_at(sq) else {
            return Vec::new();
        };
        self.destinations(sq)
            .into_iter()
            .filter(|&to| {
                let push = piece.kind == PieceKind::Pawn && to.file() == sq.file();
                let capture_only = piece.kind == PieceKind::Pawn && !push;
                match self.piece_at(to) {
                    None => !capture_only,
                    Some(q) => q.color != piece.color && !push,
                }
            })
            .collect()
    }

    /// Number of legal moves of the piece on `sq`, ignoring castling, en
    /// passant and side to move. A move is legal when it does not leave its
    /// own king attacked.
    pub fn legal_move_count(&self, sq: Square) -> usize {
        let Some(piece) = self.piece_at(sq) else {
            return 0;
        };
        self.pseudo_moves(sq)
            .into_iter()
            .filter(|&to| {
                let after = self.with_piece(sq, None).with_piece(to, Some(piece));
                match after.king_square(piece.color) {
                    Some(k) => !after.is_attacked_by(k, piece.color.opponent()),
                    None => true,
                }
            })
            .count()
    }
}

fn pawn_dir(color: Color) -> i8 {
    match color {
        Color::White => 1,
        Color::Black => -1,
    }
}

/// Parses a FEN string. Only the placement field and the optional side to
/// move are read; later fields are ignored.
pub fn parse_fen(text: &str) -> Result<ChessPosition, ParseError> {
    let mut fields = text.split_whitespace();
    let placement = fields
        .next()
        .ok_or_else(|| ParseError::FenLayout("empty FEN".into()))?;
    let side_to_move = match fields.next() {
        None | Some("w") => Color::White,
        Some("b") => Color::Black,
        Some(other) => {
            return Err(ParseError::FenLayout(format!(
                "bad side-to-move field {other:?}"
            )))
        }
    };
    let ranks: Vec<&str> = placement.split('/').collect();
    if ranks.len() != 8 {
        return Err(ParseError::FenLayout(format!(
            "expected 8 ranks, found {}",
            ranks.len()
        )));
    }
    let mut board = [None; 64];
    for (idx, rank_text) in ranks.iter().enumerate() {
        let rank_no = idx + 1;
        let rank = 7 - idx as u8;
        let mut file: u32 = 0;
        for c in rank_text.chars() {
            if let Some(d) = c.to_digit(10) {
                if !(1..=8).contains(&d) {
                    return Err(ParseError::Fen {
                        rank: rank_no,
                        reason: format!("bad empty-square count {c:?}"),
                    });
                }
                file += d;
            } else {
                let kind = PieceKind::from_letter(c).ok_or_else(|| ParseError::Fen {
                    rank: rank_no,
                    reason: format!("bad piece letter {c:?}"),
                })?;
                if file >= 8 {
                    return Err(ParseError::Fen {
                        rank: rank_no,
                        reason: "more than 8 squares".into(),
                    });
                }
                let color = if c.is_ascii_uppercase() {
                    Color::White
                } else {
                    Color::Black
                };
                board[(rank * 8) as usize + file as usize] = Some(Piece { color, kind });
                file += 1;
            }
        }
        if file != 8 {
            return Err(ParseError::Fen {
                rank: rank_no,
                reason: format!("rank covers {file} squares, expected 8"),
            });
        }
    }
    let pos = ChessPosition {
        board,
        side_to_move,
    };
    if pos.piece_count() > 32 {
        return Err(ParseError::FenLayout(format!(
            "{} pieces on the board, at most 32 allowed",
            pos.piece_count()
        )));
    }
    for color in [Color::White, Color::Black] {
        if pos.king_count(color) > 1 {
            return Err(ParseError::FenLayout(format!(
                "more than one {} king",
                color.name()
            )));
        }
    }
    Ok(pos)
}

/// Entity label of a piece: color-cased letter plus square, e.g. `qh4`.
pub fn piece_label(piece: Piece, sq: Square) -> String {
    format!("{}{}", piece.letter(), sq)
}

/// Builds the five-relation network of a position. Entities are the pieces
/// in FEN order; kind tags read like `white-queen`.
pub fn extract_chess_relations(pos: &ChessPosition) -> RelationalNetwork {
    extract_with_id(pos, "")
}

fn extract_with_id(pos: &ChessPosition, id: &str) -> RelationalNetwork {
    let pieces = pos.occupied();
    let mut index = [usize::MAX; 64];
    for (i, (sq, _)) in pieces.iter().enumerate() {
        index[sq.index()] = i;
    }
    let mut rels = Vec::new();

    for (pi, &(sq, piece)) in pieces.iter().enumerate() {
        for target in pos.attacks_from(sq) {
            if let Some(other) = pos.piece_at(target) {
                let kind = if other.color == piece.color {
                    DEFENSE
                } else {
                    ATTACK
                };
                rels.push(Relation::new(pi, index[target.index()], kind));
            }
        }

        if piece.kind.is_slider() {
            for &(df, dr) in piece.kind.directions() {
                let mut cur = sq;
                let mut first: Option<(Square, Piece)> = None;
                while let Some(next) = cur.offset(df, dr) {
                    if let Some(occ) = pos.piece_at(next) {
                        match first {
                            None => {
                                if occ.color == piece.color {
                                    rels.push(Relation::new(index[next.index()], pi, BLOCKING));
                                    break;
                                }
                                first = Some((next, occ));
                            }
                            Some((fsq, _)) => {
                                if occ.color != piece.color && occ.kind == PieceKind::King {
                                    rels.push(Relation::new(pi, index[fsq.index()], PINNING));
                                }
                                break;
                            }
                        }
                    }
                    cur = next;
                }
            }
        }

        if pos.legal_move_count(sq) == 0 {
            let without = pos.with_piece(sq, None);
            for dest in pos.destinations(sq) {
                if pos.piece_at(dest).is_some() {
                    rels.push(Relation::new(index[dest.index()], pi, CONFINEMENT));
                }
                for (oi, &(osq, other)) in pieces.iter().enumerate() {
                    if oi != pi
                        && other.color != piece.color
                        && without.attacks_from(osq).contains(&dest)
                    {
                        rels.push(Relation::new(oi, pi, CONFINEMENT));
                    }
                }
            }
        }
    }

    let entities = pieces
        .iter()
        .map(|&(sq, p)| {
            Entity::new(
                piece_label(p, sq),
                Some(format!("{}-{}", p.color.name(), p.kind.name())),
            )
        })
        .collect();
    RelationalNetwork::build(id, entities, rels, chess_registry())
        .expect("extracted relations are in range")
}

/// Parses and extracts in one step, tagging the network with `id`.
pub fn network_from_fen(fen: &str, id: &str) -> Result<RelationalNetwork, ParseError> {
    Ok(extract_with_id(&parse_fen(fen)?, id))
}

/// A battery case: two positions and the mappings the best match must make.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatteryCase {
    pub name: String,
    pub fen_a: String,
    pub fen_b: String,
    /// `(label in A, acceptable labels in B)`.
    pub key: Vec<(String, Vec<String>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeyCheck {
    pub source: String,
    pub acceptable: Vec<String>,
    pub mapped_to: Option<String>,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseReport {
    pub name: String,
    pub checks: Vec<KeyCheck>,
    pub raw: f64,
    pub normalized: f64,
}

impl CaseReport {
    pub fn satisfied(&self) -> usize {
        self.checks.iter().filter(|c| c.satisfied).count()
    }

    pub fn total(&self) -> usize {
        self.checks.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CaseOutcome {
    Ran(CaseReport),
    Failed { name: String, error: String },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BatteryReport {
    pub cases: Vec<CaseOutcome>,
}

impl BatteryReport {
    pub fn satisfied(&self) -> usize {
        self.ran().map(CaseReport::satisfied).sum()
    }

    pub fn total(&self) -> usize {
        self.ran().map(CaseReport::total).sum()
    }

    pub fn ran(&self) -> impl Iterator<Item = &CaseReport> {
        self.cases.iter().filter_map(|c| match c {
            CaseOutcome::Ran(r) => Some(r),
            CaseOutcome::Failed { .. } => None,
        })
    }

    pub fn all_passed(&self) -> bool {
        self.cases.iter().all(|c| match c {
            CaseOutcome::Ran(r) => r.satisfied() == r.total(),
            CaseOutcome::Failed { .. } => false,
        })
    }
}

fn run_case(case: &BatteryCase, config: &MatchConfig) -> Result<CaseReport, String> {
    let pos_a = parse_fen(&case.fen_a).map_err(|e| format!("fen_a: {e}"))?;
    let pos_b = parse_fen(&case.fen_b).map_err(|e| format!("fen_b: {e}"))?;
    for (side, pos) in [("fen_a", &pos_a), ("fen_b", &pos_b)] {
        for color in [Color::White, Color::Black] {
            if pos.king_count(color) != 1 {
                return Err(format!("{side}: needs exactly one {} king", color.name()));
            }
        }
    }
    let a = extract_with_id(&pos_a, &format!("{}:a", case.name));
    let b = extract_with_id(&pos_b, &format!("{}:b", case.name));

    let mut resolved = Vec::new();
    for (src, acceptable) in &case.key {
        let si = a
            .entity_index(src)
            .ok_or_else(|| format!("key label {src:?} is not a piece of fen_a"))?;
        for t in acceptable {
            if b.entity_index(t).is_none() {
                return Err(format!("key label {t:?} is not a piece of fen_b"));
            }
        }
        resolved.push((si, src, acceptable));
    }

    let result = match_networks(&a, &b, config).map_err(|e| e.to_string())?;
    let checks = resolved
        .into_iter()
        .map(|(si, src, acceptable)| {
            let mapped_to = result
                .assignment
                .target_of(si)
                .map(|t| b.entities()[t].label.clone());
            let satisfied = mapped_to.as_ref().is_some_and(|m| acceptable.contains(m));
            KeyCheck {
                source: src.clone(),
                acceptable: acceptable.clone(),
                mapped_to,
                satisfied,
            }
        })
        .collect();
    Ok(CaseReport {
        name: case.name.clone(),
        checks,
        raw: result.score.raw,
        normalized: result.score.normalized,
    })
}

/// Runs every case independently; a case that cannot be set up is reported
/// as failed and the rest still run.
pub fn run_battery(cases: &[BatteryCase], config: &MatchConfig) -> BatteryReport {
    use rayon::prelude::*;
    BatteryReport {
        cases: cases
            .par_iter()
            .map(|case| match run_case(case, config) {
                Ok(r) => CaseOutcome::Ran(r),
                Err(error) => CaseOutcome::Failed {
                    name: case.name.clone(),
                    error,
                },
            })
            .collect(),
    }
}

/// The shipped three-case battery file.
pub const DEFAULT_BATTERY: &str = include_str!("../data/battery.jsonl");

pub fn default_battery() -> Vec<BatteryCase> {
    DEFAULT_BATTERY
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).expect("shipped battery parses"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const FOOLS_MATE: &str = "rnb1kbnr/pppp1ppp/8/4p3/6Pq/5P2/PPPPP2P/RNBQKBNR";
    const ENDGAME: &str = "8/8/8/8/8/6b1/2k1P3/4KB2";

    fn rel(net: &RelationalNetwork, src: &str, dst: &str, kind: RelationTypeId) -> bool {
        let (Some(s), Some(d)) = (net.entity_index(src), net.entity_index(dst)) else {
            return false;
        };
        net.has_relation(s, d, kind)
    }

    #[test]
    fn piece_counts() {
        assert_eq!(
            parse_fen("8/3k4/4pPp1/3pP1P1/2pP4/2P5/3K4/7B")
                .unwrap()
                .piece_count(),
            12
        );
        assert_eq!(
            parse_fen("8/pP2k3/P7/2K5/8/8/8/8").unwrap().piece_count(),
            5
        );
        assert_eq!(parse_fen("8/8/8/8/8/8/8/8").unwrap().piece_count(), 0);
        assert_eq!(parse_fen(FOOLS_MATE).unwrap().piece_count(), 32);
    }

    #[test]
    fn side_to_move() {
        assert_eq!(
            parse_fen("8/8/8/8/8/8/8/8").unwrap().side_to_move,
            Color::White
        );
        assert_eq!(
            parse_fen("8/8/8/8/8/8/8/8 b KQkq - 0 1")
                .unwrap()
                .side_to_move,
            Color::Black
        );
        assert!(parse_fen("8/8/8/8/8/8/8/8 x").is_err());
    }

    #[test]
    fn fen_errors_name_the_rank() {
        assert_eq!(
            parse_fen("8/8/7/8/8/8/8/8").unwrap_err(),
            ParseError::Fen {
                rank: 3,
                reason: "rank covers 7 squares, expected 8".into()
            }
        );
        match parse_fen("8/8/8/8/8/8/8/7x").unwrap_err() {
            ParseError::Fen { rank, reason } => {
                assert_eq!(rank, 8);
                assert!(reason.contains("bad piece letter"));
            }
            e => panic!("{e:?}"),
        }
        assert!(matches!(
            parse_fen("8/8/8/8/8/8/8/9"),
            Err(ParseError::Fen { rank: 8, .. })
        ));
        assert!(matches!(parse_fen("8/8/8"), Err(ParseError::FenLayout(_))));
        assert!(matches!(
            parse_fen("ppppppppp/8/8/8/8/8/8/8"),
            Err(ParseError::Fen { rank: 1, .. })
        ));
        assert!(parse_fen("k6k/8/8/8/8/8/8/8").is_err());
    }

    #[test]
    fn labels_are_color_cased() {
        let n = network_from_fen(FOOLS_MATE, "fm").unwrap();
        assert!(n.entity_index("qh4").is_some());
        assert!(n.entity_index("Ke1").is_some());
        assert!(n.entity_index("Pg4").is_some());
        assert_eq!(
            n.entities()[n.entity_index("qh4").unwrap()].kind.as_deref(),
            Some("black-queen")
        );
    }

    #[test]
    fn fools_mate_king_is_confined() {
        let pos = parse_fen(FOOLS_MATE).unwrap();
        assert_eq!(pos.legal_move_count(Square::parse("e1").unwrap()), 0);
        let n = extract_chess_relations(&pos);
        assert!(rel(&n, "qh4", "Ke1", CONFINEMENT));
        assert!(rel(&n, "qh4", "Ke1", ATTACK));
        assert!(rel(&n, "Pe2", "Bf1", BLOCKING));
    }

    #[test]
    fn endgame_blocking_and_confinement() {
        let n = network_from_fen(ENDGAME, "eg").unwrap();
        assert!(rel(&n, "Pe2", "Bf1", BLOCKING));
        assert!(rel(&n, "Pe2", "Bf1", CONFINEMENT));
        assert!(rel(&n, "bg3", "Ke1", CONFINEMENT));
        assert!(rel(&n, "kc2", "Ke1", CONFINEMENT));
        assert!(rel(&n, "bg3", "Ke1", ATTACK));
        assert!(rel(&n, "Ke1", "Bf1", DEFENSE));
    }

    #[test]
    fn lone_kings_have_no_interaction() {
        let n = network_from_fen("7k/8/8/8/8/8/8/K7", "kk").unwrap();
        for kind in [ATTACK, DEFENSE, BLOCKING, PINNING, CONFINEMENT] {
            assert_eq!(n.relations_of(kind).count(), 0);
        }
    }

    #[test]
    fn pin_detected() {
        // The king behind the knight is White's own, so nothing is pinned.
        let n = network_from_fen("k7/8/8/8/8/8/8/R2n3K w", "pin").unwrap();
        assert_eq!(n.relations_of(PINNING).count(), 0);
        let n = network_from_fen("K7/8/8/8/8/8/8/R2n3k w", "pin").unwrap();
        assert!(rel(&n, "Ra1", "nd1", PINNING));
        assert!(rel(&n, "Ra1", "nd1", ATTACK));
        // Pinned, but the rook covers none of the knight's squares.
        assert!(!rel(&n, "Ra1", "nd1", CONFINEMENT));
        let pos = parse_fen("K7/8/8/8/8/8/8/R2n3k w").unwrap();
        assert_eq!(pos.legal_move_count(Square::parse("d1").unwrap()), 0);
    }

    #[test]
    fn pawn_attacks_are_diagonal() {
        let n = network_from_fen("k7/8/8/8/8/3ppp2/4P3/K7", "p").unwrap();
        assert!(rel(&n, "Pe2", "pd3", ATTACK));
        assert!(rel(&n, "Pe2", "pf3", ATTACK));
        assert!(!rel(&n, "Pe2", "pe3", ATTACK));
        assert!(rel(&n, "pd3", "Pe2", ATTACK));
    }

    #[test]
    fn no_self_loops() {
        for case in default_battery() {
            for fen in [&case.fen_a, &case.fen_b] {
                let n = network_from_fen(fen, "x").unwrap();
                assert!(n.relations().iter().all(|r| r.src != r.dst));
            }
        }
    }

    #[test]
    fn empty_battery() {
        let r = run_battery(&[], &MatchConfig::default());
        assert_eq!((r.satisfied(), r.total()), (0, 0));
        assert!(r.all_passed());
    }

    #[test]
    fn unresolvable_label_fails_only_that_case() {
        let mut cases = default_battery();
        cases[0].key.push(("Zz9".into(), vec!["Ke1".into()]));
        let r = run_battery(&cases[..2], &MatchConfig::default());
        assert!(matches!(r.cases[0], CaseOutcome::Failed { .. }));
        assert!(matches!(r.cases[1], CaseOutcome::Ran(_)));
    }
}
