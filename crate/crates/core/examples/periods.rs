//! The period series ξ of CP² and its images under the multiplication
//! operator, plus the fourth-order equation ξ satisfies.

use cpn_mirror::periods::{d_star, xi_series, PeriodTable};
use cpn_mirror::series::HbarWindow;

fn main() -> anyhow::Result<()> {
    let n = 2;
    let window = HbarWindow::new(-12, 2);
    let xi = xi_series(n, 4, window)?;
    println!("ξ for CP^2, coefficient of α^k ℏ^j:");
    for j in (window.j_min..=0).rev().step_by(n + 1) {
        let row: Vec<String> = (0..=n).map(|k| xi.get(k, j).to_string()).collect();
        println!("  ℏ^{j:<4} [{}]", row.join(", "));
    }

    let mut lhs = xi.value.clone();
    for _ in 0..=n {
        lhs = d_star(&lhs);
    }
    let rhs = xi.value.shift_hbar(-(n as i32 + 1))?;
    let from = lhs.exact_from().max(rhs.exact_from());
    let ok = lhs.first_difference(&rhs, (from, 0), 0).is_none();
    println!("(D*)^3 ξ = ℏ^-3 ξ on the exact range: {ok}");

    let table = PeriodTable::new(n, 4, -12)?;
    println!("highest ℏ-power of each α^k in φ^l = f^l ξ:");
    for l in 0..=4 {
        let lead: Vec<String> = (0..=n)
            .filter_map(|k| table.support(l, k).next().map(|(j, c)| format!("{c}·α^{k}ℏ^{j}")))
            .collect();
        println!("  φ^{l}: {}", lead.join(", "));
    }
    Ok(())
}
