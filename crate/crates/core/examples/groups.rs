use flatveech::{build_default, compute_veech_group, Family};

fn main() {
    for kind in [Family::Dihedral, Family::Cyclic] {
        for n in 3..=8 {
            let t = std::time::Instant::now();
            let c = build_default(kind, n).unwrap();
            let g = compute_veech_group(&c.surface).unwrap();
            println!(
                "{kind} {n}: {} order {} transl {} ({:.2?})",
                g.group_type,
                g.order(),
                g.translation_automorphisms,
                t.elapsed()
            );
        }
    }
}
