import hypothesis

# Property tests run LP solves and game builds whose wall-clock varies a lot
# between machines; deadlines would only add flakes.
hypothesis.settings.register_profile(
    "fedpart",
    deadline=None,
    max_examples=50,
    derandomize=True,
)
hypothesis.settings.load_profile("fedpart")
