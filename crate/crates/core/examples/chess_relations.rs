//! Prints the relations extracted from each FEN given on the command line.
//!
//! `cargo run --example chess_relations -- "8/8/8/8/8/6b1/2k1P3/4KB2"`

use relanalogy::chess::{network_from_fen, CHESS_RELATIONS};

fn main() {
    for fen in std::env::args().skip(1) {
        let net = match network_from_fen(&fen, "position") {
            Ok(n) => n,
            Err(e) => {
                eprintln!("{fen}: {e}");
                continue;
            }
        };
        println!("{fen}");
        for r in net.relations() {
            let label = |i: usize| &net.entities()[i].label;
            println!(
                "  {} {} {}",
                label(r.src),
                CHESS_RELATIONS[r.rel.0],
                label(r.dst)
            );
        }
    }
}
