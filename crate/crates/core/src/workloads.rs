//! Generated benchmark programs whose Herbrand base grows with a size knob.

use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `move(i,i+1)` for `i < n-1` and the win rule.
    WinChain,
    /// A win chain closed into a cycle of odd length, so every `win` atom is undefined.
    WinCycle,
    /// Reachability over a `k`×`k` grid with edges right and down.
    ReachGrid,
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "winchain" => Ok(Family::WinChain),
            "wincycle" => Ok(Family::WinCycle),
            "reachgrid" => Ok(Family::ReachGrid),
            _ => Err(format!("unknown family {s:?}; expected winchain, wincycle or reachgrid")),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::WinChain => "winchain",
            Family::WinCycle => "wincycle",
            Family::ReachGrid => "reachgrid",
        })
    }
}

const WIN_RULE: &str = "win(x) <- move(x,y) and not win(y).\n";

fn isqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

impl Family {
    /// The size parameter whose program has about `atoms` Herbrand-base atoms.
    pub fn parameter_for(self, atoms: usize) -> usize {
        match self {
            // n^2 move atoms + n win atoms.
            Family::WinChain => isqrt(atoms).max(2),
            Family::WinCycle => {
                let n = isqrt(atoms).max(3);
                if n.is_multiple_of(2) {
                    n + 1
                } else {
                    n
                }
            }
            // V^2 edge atoms + V source and V reach atoms, V = k^2.
            Family::ReachGrid => isqrt(isqrt(atoms)).max(2),
        }
    }

    pub fn program(self, n: usize) -> String {
        let mut text = String::new();
        match self {
            Family::WinChain | Family::WinCycle => {
                text.push_str(WIN_RULE);
                for i in 0..n - 1 {
                    text.push_str(&format!("move({i},{}).\n", i + 1));
                }
                if self == Family::WinCycle {
                    text.push_str(&format!("move({},0).\n", n - 1));
                }
            }
            Family::ReachGrid => {
                text.push_str("reach(x) <- source(x).\nreach(y) <- edge(x,y) and reach(x).\nsource(0).\n");
                for i in 0..n {
                    for j in 0..n {
                        let v = i * n + j;
                        if j + 1 < n {
                            text.push_str(&format!("edge({v},{}).\n", v + 1));
                        }
                        if i + 1 < n {
                            text.push_str(&format!("edge({v},{}).\n", v + n));
                        }
                    }
                }
            }
        }
        text
    }
}
