"""Reminder prompt wording and the canonical reminder message per type."""

CANONICAL_REMINDER = {
    "medication": "Please take your medication now.",
    "hygiene": "Please remember your personal care routine: brush your teeth and wash.",
    "check_in": "Checking in: how are you feeling today?",
    "appointment": "Reminder: you have an appointment today.",
    "household": "Reminder: time for your household chores.",
}

PROMPT_VARIANTS = {
    "medication": (
        "Time to take your medication.",
        "Please take your pills now.",
        "Reminder: your medication is due.",
        "Have you taken your tablets yet?",
    ),
    "hygiene": (
        "Time to brush your teeth.",
        "Time for your shower.",
        "Please wash up and get ready for the day.",
        "Reminder: brush your teeth and wash your face.",
    ),
    "check_in": (
        "How are you feeling today?",
        "Just checking in, how is your day going?",
        "How are you doing this afternoon?",
        "Checking in: did you eat lunch?",
    ),
    "appointment": (
        "Reminder: doctor appointment this afternoon.",
        "Your appointment at the clinic is coming up.",
        "Don't forget your appointment today, the taxi is booked.",
        "Time to leave for your appointment.",
    ),
    "household": (
        "Time to water the plants.",
        "Reminder: please take out the bins.",
        "Time to do the washing.",
        "Please tidy the kitchen.",
    ),
}
