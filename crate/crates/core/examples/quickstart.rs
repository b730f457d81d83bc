use genent::{genuine_entanglement, ghz, w_state, Error};

fn main() -> Result<(), Error> {
    for (name, state) in [("GHZ_4", ghz(4)?), ("W_4", w_state(4)?)] {
        let report = genuine_entanglement(&state)?;
        println!("{name}: E = {:.12}  (S_I = {:.6}, S_II = {:.6})", report.value, report.sum_class_i, report.sum_class_ii);
    }
    Ok(())
}
