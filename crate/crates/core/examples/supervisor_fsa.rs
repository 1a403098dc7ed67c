//! Drive the consult supervisor through a lawful run, a rejected event and a
//! failure.

use oncodss::reasoning::{is_lawful_trace, SupervisorEvent as E, SupervisorState};

fn main() {
    let mut s = SupervisorState::new();
    for e in [E::QueryReceived, E::Interpreted, E::Diagnosed, E::Prognosed, E::Planned, E::Retrieved] {
        s = s.step(e).expect("lawful step");
    }
    println!("happy path: {:?}", s.states());

    match SupervisorState::new().step(E::Planned) {
        Ok(_) => unreachable!(),
        Err(e) => println!("rejected: {e}"),
    }

    let failed = SupervisorState::new()
        .step(E::QueryReceived)
        .and_then(|s| s.step(E::Error))
        .expect("error is always accepted");
    println!("failure: {:?}, lawful = {}", failed.states(), is_lawful_trace(&failed.trace));
    println!("reset from Failed accepted: {}", failed.step(E::Reset).is_ok());
}
