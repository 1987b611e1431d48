"""Dry-run the three bundled business processes against the virtual desktop."""

from xrl.sim import SCENARIOS, load_scenario, simulate

for name in SCENARIOS:
    doc, env0, expected = load_scenario(name)
    trace = simulate(doc, env0)
    print(f"== {name}: {len(trace.steps)} steps, {trace.outcome}")
    print(trace.to_text(), end="")
    print(f"final digest matches fixture: {trace.final_env.digest() == expected}\n")

doc, env0, _ = load_scenario("p1_search_email")
message = simulate(doc, env0).final_env.sent_messages[0]
print(f"P1 sent {message.body!r} to {message.to}")
