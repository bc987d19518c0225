use std::fmt::Write;

use super::expand::expand;
use super::system::DeflatedSystem;
use crate::error::Result;
use crate::polysys::format_coefficient;

/// Text form of the expanded system, followed by a comment block holding the
/// random `B` and `h` of every stage.
pub fn export_deflated(sys: &DeflatedSystem) -> Result<String> {
    let mut out = expand(sys)?.to_string();
    writeln!(out, "# deflation stages: {}", sys.depth()).unwrap();
    for (k, st) in sys.stages().iter().enumerate() {
        let k = k + 1;
        writeln!(
            out,
            "# stage {k}: rank {}, B is {}x{}",
            st.rank,
            st.b.rows(),
            st.b.cols()
        )
        .unwrap();
        for i in 0..st.b.rows() {
            let row: Vec<String> = st.b.row(i).iter().map(|&z| format_coefficient(z)).collect();
            writeln!(out, "# B{k} {}", row.join(" ")).unwrap();
        }
        let h: Vec<String> = st.h.iter().map(|&z| format_coefficient(z)).collect();
        writeln!(out, "# h{k} {}", h.join(" ")).unwrap();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::stage::{DeflationRng, DeflationStage};
    use super::*;
    use crate::polysys::parse_system;

    #[test]
    fn export_reparses_with_multiplier_names() {
        let base = parse_system("1\nx\nx^2;").unwrap();
        let st = DeflationStage::random(&mut DeflationRng::new(2), 0, 1, 1);
        let sys = DeflatedSystem::new(base).with_stage(st).unwrap();
        let text = export_deflated(&sys).unwrap();
        let back = parse_system(&text).unwrap();
        assert_eq!(back.names(), ["x", "l_1_1"]);
        assert_eq!(back.neqs(), 3);
        assert!(text.contains("# B1 ("));
        assert!(text.contains("# h1 ("));
    }
}
