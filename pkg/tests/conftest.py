from hypothesis import settings

# Sampling is derandomized: every run draws the same examples.
settings.register_profile("qortho", derandomize=True, deadline=None, max_examples=40, print_blob=True)
settings.load_profile("qortho")
