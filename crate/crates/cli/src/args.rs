use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::figure::FigureKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

/// Stability conditions on the n-Kronecker quiver: chart maps, the quotient
/// map to CP^1, path lifting and figures.
#[derive(Debug, Parser)]
#[command(name = "kstab", version)]
pub struct Cli {
    /// Number of arrows of the quiver.
    #[arg(short = 'n', long = "n", global = true, default_value_t = 2,
          value_parser = clap::value_parser!(u32).range(1..))]
    pub n: u32,
    /// Tolerance for comparisons (chordal distance on CP^1).
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for commands that sample randomly.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// The sequence a_k with consecutive ratios and their limits.
    Seq {
        #[arg(short = 'k', long = "kmax", default_value_t = 10)]
        kmax: i64,
    },
    /// Position of [z0 : z1] relative to the removed set.
    Classify {
        #[arg(allow_hyphen_values = true)]
        z0: String,
        #[arg(allow_hyphen_values = true)]
        z1: String,
    },
    /// Moves an overlap point (z, w) from one chart to another.
    ChartMap {
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        from: i64,
        #[arg(long, allow_hyphen_values = true)]
        to: i64,
        #[arg(allow_hyphen_values = true)]
        z: String,
        #[arg(allow_hyphen_values = true)]
        w: String,
    },
    /// Moves an overlap point w of the quotient from one chart to another.
    QuotientMap {
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        from: i64,
        #[arg(long, allow_hyphen_values = true)]
        to: i64,
        #[arg(allow_hyphen_values = true)]
        w: String,
    },
    /// chi_n(w) for w in chart k.
    Chi {
        #[arg(short = 'k', long, default_value_t = 0, allow_hyphen_values = true)]
        k: i64,
        #[arg(allow_hyphen_values = true)]
        w: String,
    },
    /// Preimages of [z0 : z1] in charts |k| <= k-max with 0 < Im w <= im-max.
    Fiber {
        #[arg(allow_hyphen_values = true)]
        z0: String,
        #[arg(allow_hyphen_values = true)]
        z1: String,
        #[arg(long, default_value_t = 10.0)]
        im_max: f64,
        #[arg(long, default_value_t = 2)]
        k_max: i64,
    },
    /// Stability condition with Z(S_0) = z0, Z(S_1) = z1.
    Construct {
        #[arg(allow_hyphen_values = true)]
        z0: Option<String>,
        #[arg(allow_hyphen_values = true)]
        z1: Option<String>,
        /// Instead of z0, z1: build and validate this many random conditions.
        #[arg(long)]
        random: Option<usize>,
    },
    /// Checks a stability record given as JSON (file or stdin).
    Validate { file: Option<PathBuf> },
    /// Lifts a path through chi_n (or through the central charge with --total).
    Lift {
        /// CSV (re0,im0,re1,im1) or JSON path file.
        #[arg(long)]
        path: Option<PathBuf>,
        /// Circle around the point z0,z1 of CP^1.
        #[arg(long, allow_hyphen_values = true)]
        loop_around: Option<String>,
        /// Chordal radius of the --loop-around circle.
        #[arg(long, default_value_t = 0.1)]
        radius: f64,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        /// Treat the path as closed.
        #[arg(long)]
        closed: bool,
        /// Lift through the central charge map instead of chi_n.
        #[arg(long)]
        total: bool,
        /// Chart of the starting point.
        #[arg(long, allow_hyphen_values = true)]
        start_chart: Option<i64>,
        /// Starting w (requires --start-chart).
        #[arg(long, allow_hyphen_values = true)]
        start_w: Option<String>,
        #[arg(long, default_value_t = 0.05)]
        max_step: f64,
        #[arg(long, default_value_t = 20)]
        depth: u32,
    },
    /// Lifts a circle around [z0 : z1] once and reports the end point.
    Monodromy {
        #[arg(allow_hyphen_values = true)]
        z0: String,
        #[arg(allow_hyphen_values = true)]
        z1: String,
        #[arg(long, default_value_t = 0.03)]
        radius: f64,
        #[arg(long, allow_hyphen_values = true)]
        start_chart: Option<i64>,
        #[arg(long, allow_hyphen_values = true)]
        start_w: Option<String>,
    },
    /// Figure data: the slit picture of the quotient, psi_k grid images, or
    /// chi_n grid images.
    Render {
        #[arg(long, value_enum)]
        figure: FigureKind,
        /// Charts |k| <= charts are drawn (n = 1 always uses 0, 1, 2).
        #[arg(long, default_value_t = 3)]
        charts: i64,
        /// Number of vertical grid lines.
        #[arg(long, default_value_t = 9)]
        grid_re: usize,
        /// Samples along each grid line.
        #[arg(long, default_value_t = 48)]
        grid_im: usize,
        /// Slits and punctures are listed for |k| <= slit-kmax.
        #[arg(long, default_value_t = 12)]
        slit_kmax: i64,
    },
}
