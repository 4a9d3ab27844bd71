/// One reproducible figure: the subcommand and arguments that tabulate it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Figure {
    pub number: u32,
    pub subcommand: &'static str,
    pub args: &'static str,
    pub content: &'static str,
}

pub const FIGURES: &[Figure] = &[
    Figure { number: 4, subcommand: "fringes", args: "--alpha2 1e6 --lambda 0 --seed 7", content: "Monte Carlo fringes, coherent light" },
    Figure { number: 5, subcommand: "fringes", args: "--alpha2 1e6 --lambda 1e2 --seed 7", content: "fringes with a squeezed vacuum in the second port" },
    Figure { number: 5, subcommand: "ratio", args: "--alpha2 1e4 --lambda 10", content: "squeezed over coherent sensitivity ratio" },
    Figure { number: 7, subcommand: "qfi-bounds", args: "--kind passive", content: "optimal passive probe: beta_tot and QFI scaling" },
    Figure { number: 7, subcommand: "qfi-bounds", args: "--kind clbi", content: "optimal active probe: beta, delta and QFI scaling" },
    Figure { number: 8, subcommand: "config-opt", args: "--family passive-passive --eta 0.9", content: "passive interaction, passive detection" },
    Figure { number: 9, subcommand: "config-opt", args: "--family passive-active", content: "passive interaction, active detection" },
    Figure { number: 9, subcommand: "config-opt", args: "--family passive-active --vary gain", content: "efficiency robustness against detection gain" },
    Figure { number: 10, subcommand: "config-opt", args: "--family active-active", content: "active interaction, active detection" },
    Figure { number: 10, subcommand: "config-opt", args: "--family active-active --vary gain", content: "efficiency robustness against detection gain" },
    Figure { number: 11, subcommand: "illumination", args: "--mb 1300 --seed 1", content: "covariance with and without the object" },
    Figure { number: 12, subcommand: "illumination", args: "--mb 57,1300 --seed 1", content: "target detection error probability" },
    Figure { number: 15, subcommand: "nrf", args: "--mu 1e2", content: "noise reduction factors against transmission" },
    Figure { number: 16, subcommand: "holometer-ratio", args: "--family twb --vary eta", content: "covariance uncertainty ratio against efficiency" },
    Figure { number: 17, subcommand: "holometer-ratio", args: "--family twb --vary phi0", content: "uncertainty ratios against the working phase" },
    Figure { number: 18, subcommand: "holometer-ratio", args: "--family twb --vary lambda", content: "uncertainty ratios against twin-beam energy" },
    Figure { number: 19, subcommand: "holometer-ratio", args: "--family squeezed --vary eta --phi0 1e-2 --observable port-product", content: "squeezed-vacuum ratio against efficiency" },
    Figure { number: 20, subcommand: "holometer-ratio", args: "--output threshold --vary lambda", content: "efficiency threshold where twin beams beat squeezed vacua" },
];

pub fn figures_for(sub: &str) -> Vec<u32> {
    let mut v: Vec<u32> = FIGURES.iter().filter(|f| f.subcommand == sub).map(|f| f.number).collect();
    v.dedup();
    v
}

pub fn render() -> String {
    let mut s = String::from("figure\tsubcommand\targuments\tcontent\n");
    for f in FIGURES {
        s.push_str(&format!("{}\t{}\t{}\t{}\n", f.number, f.subcommand, f.args, f.content));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const SUBCOMMANDS: [&str; 7] = ["fringes", "ratio", "qfi-bounds", "config-opt", "illumination", "holometer-ratio", "nrf"];

    #[test]
    fn mapping_is_self_consistent() {
        assert!(FIGURES.len() >= 12);
        assert!(FIGURES.iter().all(|f| SUBCOMMANDS.contains(&f.subcommand)));
        for n in [4, 5, 7, 8, 9, 10, 11, 12, 15, 16, 17, 18, 19, 20] {
            assert!(FIGURES.iter().any(|f| f.number == n), "figure {n}");
        }
    }
}
