"""Bundled toy world: a small knowledge base and annotated questions.

Deterministic fixture used by the demos and the test suite: 57 entities,
95 triples, 28 questions. The facts are simplified for fixture purposes;
ids follow the Qxxx/Pxx convention of the data files the loader expects.
"""

from .data import AnnotatedQuestion, GoldEntity
from .kb import EntityRecord, KnowledgeBase

ENTITIES = [
    # concepts
    ("Q24951125", "albums", 500, "thing"),
    ("Q7366", "song", 480, "thing"),
    ("Q11424", "film", 620, "thing"),
    ("Q515", "city", 700, "thing"),
    ("Q6256", "country", 650, "thing"),
    ("Q215380", "band", 430, "thing"),
    ("Q783794", "company", 410, "thing"),
    ("Q28640", "profession", 300, "thing"),
    ("Q177", "pop music", 350, "thing"),
    ("Q38848", "heavy metal", 280, "thing"),
    # people
    ("Q462", "Taylor Swift", 8123, "person"),
    ("Q76", "Barack Obama", 9500, "person"),
    ("Q13133", "Michelle Obama", 4200, "person"),
    ("Q27453", "Taylor Lautner", 900, "person"),
    ("Q3141", "Paris Hilton", 1200, "person"),
    ("Q35332", "Scarlett Johansson", 3100, "person"),
    ("Q37079", "Robert Downey Jr", 2900, "person"),
    ("Q181900", "Jon Favreau", 800, "person"),
    ("Q615", "Lionel Messi", 7800, "person"),
    ("Q181316", "Stan Lee", 2500, "person"),
    ("Q34660", "J K Rowling", 3300, "person"),
    ("Q19837", "Steve Jobs", 3500, "person"),
    # fictional characters
    ("Q178333", "Iron Man", 1500, "fictional character"),
    ("Q8337", "Harry Potter", 2800, "fictional character"),
    ("Q1026061", "Tony Stark", 1100, "fictional character"),
    # products (albums, songs, films)
    ("Q192724", "Iron Man", 2100, "product"),
    ("Q571232", "Red", 600, "product"),
    ("Q16320016", "1989", 700, "product"),
    ("Q17343437", "Shake It Off", 450, "product"),
    ("Q1362883", "The Trooper", 300, "product"),
    ("Q1888360", "Man of Iron", 150, "product"),
    ("Q44523", "Twilight", 950, "product"),
    # locations
    ("Q60", "New York City", 9100, "location"),
    ("Q1384", "New York", 8000, "location"),
    ("Q90", "Paris", 8800, "location"),
    ("Q64", "Berlin", 6700, "location"),
    ("Q142", "France", 9200, "location"),
    ("Q183", "Germany", 8900, "location"),
    ("Q30", "United States", 9800, "location"),
    ("Q65", "Los Angeles", 7200, "location"),
    ("Q84", "London", 8500, "location"),
    ("Q243", "Eiffel Tower", 3300, "location"),
    ("Q82425", "Berlin Wall", 2000, "location"),
    # organizations
    ("Q312", "Apple Inc", 5600, "organization"),
    ("Q23037", "NASA", 4100, "organization"),
    ("Q38262", "Iron Maiden", 1700, "organization"),
    ("Q1065", "United Nations", 3900, "organization"),
    ("Q5794", "FC Barcelona", 4800, "organization"),
    # events
    ("Q362", "World War II", 7600, "event"),
    ("Q361", "World War I", 6900, "event"),
    ("Q19317", "World Cup", 5200, "event"),
    # things
    ("Q89", "apple", 1900, "thing"),
    # professions
    ("Q30461", "president", 3000, "profession"),
    ("Q177220", "singer", 2600, "profession"),
    ("Q33999", "actor", 2400, "profession"),
    ("Q937857", "footballer", 2200, "profession"),
    ("Q30185", "mayor", 1800, "profession"),
    ("Q36180", "writer", 2000, "profession"),
]

RELATIONS = [
    ("P31", "instance of"),
    ("P106", "occupation"),
    ("P175", "performer"),
    ("P57", "director"),
    ("P161", "cast member"),
    ("P112", "founded by"),
    ("P17", "country"),
    ("P131", "located in"),
    ("P36", "capital"),
    ("P54", "member of sports team"),
    ("P50", "author"),
    ("P460", "said to be the same as"),
    ("P136", "genre"),
    ("P27", "country of citizenship"),
    ("P463", "member of"),
    ("P26", "spouse"),
    ("P361", "part of"),
    ("P800", "notable work"),
]

TRIPLES = [
    # instance of
    ("Q571232", "P31", "Q24951125"), ("Q16320016", "P31", "Q24951125"),
    ("Q17343437", "P31", "Q7366"), ("Q1362883", "P31", "Q7366"),
    ("Q192724", "P31", "Q11424"), ("Q1888360", "P31", "Q11424"),
    ("Q44523", "P31", "Q11424"),
    ("Q60", "P31", "Q515"), ("Q90", "P31", "Q515"), ("Q64", "P31", "Q515"),
    ("Q65", "P31", "Q515"), ("Q84", "P31", "Q515"),
    ("Q142", "P31", "Q6256"), ("Q30", "P31", "Q6256"), ("Q183", "P31", "Q6256"),
    ("Q312", "P31", "Q783794"), ("Q38262", "P31", "Q215380"),
    ("Q30461", "P31", "Q28640"), ("Q177220", "P31", "Q28640"),
    ("Q33999", "P31", "Q28640"), ("Q937857", "P31", "Q28640"),
    ("Q30185", "P31", "Q28640"), ("Q36180", "P31", "Q28640"),
    # occupation
    ("Q462", "P106", "Q177220"), ("Q76", "P106", "Q30461"),
    ("Q27453", "P106", "Q33999"), ("Q3141", "P106", "Q33999"),
    ("Q35332", "P106", "Q33999"), ("Q37079", "P106", "Q33999"),
    ("Q181900", "P106", "Q33999"), ("Q615", "P106", "Q937857"),
    ("Q181316", "P106", "Q36180"), ("Q34660", "P106", "Q36180"),
    ("Q13133", "P106", "Q36180"),
    # performer
    ("Q571232", "P175", "Q462"), ("Q16320016", "P175", "Q462"),
    ("Q17343437", "P175", "Q462"), ("Q1362883", "P175", "Q38262"),
    # director / cast
    ("Q192724", "P57", "Q181900"),
    ("Q192724", "P161", "Q37079"), ("Q192724", "P161", "Q35332"),
    ("Q44523", "P161", "Q27453"),
    # founders
    ("Q312", "P112", "Q19837"), ("Q23037", "P112", "Q30"),
    # geography
    ("Q90", "P17", "Q142"), ("Q60", "P17", "Q30"), ("Q1384", "P17", "Q30"),
    ("Q65", "P17", "Q30"), ("Q64", "P17", "Q183"), ("Q243", "P17", "Q142"),
    ("Q82425", "P17", "Q183"), ("Q19317", "P17", "Q30"),
    ("Q142", "P36", "Q90"), ("Q183", "P36", "Q64"),
    ("Q60", "P131", "Q1384"), ("Q243", "P131", "Q90"),
    ("Q82425", "P131", "Q64"), ("Q1065", "P131", "Q60"),
    ("Q1384", "P361", "Q30"), ("Q90", "P361", "Q142"), ("Q65", "P361", "Q30"),
    ("Q60", "P361", "Q30"),
    # memberships, authorship, identity
    ("Q615", "P54", "Q5794"),
    ("Q8337", "P50", "Q34660"), ("Q178333", "P50", "Q181316"),
    ("Q178333", "P460", "Q1026061"),
    ("Q30", "P463", "Q1065"), ("Q183", "P463", "Q1065"), ("Q142", "P463", "Q1065"),
    # genre
    ("Q462", "P136", "Q177"), ("Q571232", "P136", "Q177"),
    ("Q16320016", "P136", "Q177"), ("Q17343437", "P136", "Q177"),
    ("Q38262", "P136", "Q38848"), ("Q1362883", "P136", "Q38848"),
    # citizenship
    ("Q462", "P27", "Q30"), ("Q76", "P27", "Q30"), ("Q13133", "P27", "Q30"),
    ("Q27453", "P27", "Q30"), ("Q35332", "P27", "Q30"), ("Q37079", "P27", "Q30"),
    ("Q3141", "P27", "Q30"), ("Q181316", "P27", "Q30"), ("Q19837", "P27", "Q30"),
    ("Q181900", "P27", "Q30"),
    # spouses
    ("Q76", "P26", "Q13133"), ("Q13133", "P26", "Q76"),
    # notable works
    ("Q462", "P800", "Q571232"), ("Q462", "P800", "Q16320016"),
    ("Q38262", "P800", "Q1362883"), ("Q34660", "P800", "Q8337"),
    ("Q181316", "P800", "Q178333"), ("Q181900", "P800", "Q192724"),
    ("Q37079", "P800", "Q192724"), ("Q27453", "P800", "Q44523"),
    ("Q35332", "P800", "Q192724"),
]

# (question text, [(entity id, mention text or None, is_main)])
QUESTIONS = [
    ("what are taylor swift's albums",
     [("Q462", "taylor swift", True), ("Q24951125", "albums", False)]),
    ("where was barack obama born", [("Q76", "barack obama", True)]),
    ("where does michelle obama live", [("Q13133", "michelle obama", True)]),
    ("who is the mayor of new york city",
     [("Q60", "new york city", True), ("Q30185", "mayor", False)]),
    ("what is the population of new york", [("Q1384", "new york", True)]),
    ("what movies did taylor lautner star in", [("Q27453", "taylor lautner", True)]),
    ("who directed iron man", [("Q192724", "iron man", True)]),
    ("who created iron man", [("Q178333", "iron man", True)]),
    ("what songs are on the album red", [("Q571232", "red", True)]),
    ("when did world war ii end", [("Q362", "world war ii", True)]),
    ("where is the eiffel tower", [("Q243", "eiffel tower", True)]),
    ("who founded apple", [("Q312", "apple", True)]),
    ("where does paris hilton live", [("Q3141", "paris hilton", True)]),
    ("what country is paris the capital of",
     [("Q90", "paris", True), ("Q6256", "country", False)]),
    ("who wrote harry potter", [("Q8337", "harry potter", True)]),
    ("when was nasa founded", [("Q23037", "nasa", True)]),
    ("what is the capital of france", [("Q142", "france", True)]),
    ("who sings shake it off", [("Q17343437", "shake it off", True)]),
    ("what band plays the trooper",
     [("Q1362883", "the trooper", True), ("Q215380", "band", False)]),
    ("who is the president of the united states",
     [("Q30461", "president", True), ("Q30", "united states", False)]),
    ("what movies has scarlett johansson been in", [("Q35332", "scarlett johansson", True)]),
    ("when was the berlin wall built", [("Q82425", "berlin wall", True)]),
    ("what team does lionel messi play for", [("Q615", "lionel messi", True)]),
    ("where was the fifa world cup held", [("Q19317", "world cup", True)]),
    ("is an apple a fruit", [("Q89", "apple", True)]),
    ("when did world war i start", [("Q361", "world war i", True)]),
    ("where is the united nations headquartered", [("Q1065", "united nations", True)]),
    ("what is the capital of germany", [("Q183", "germany", True)]),
]


def build_toy_kb():
    kb = KnowledgeBase()
    for eid, label, freq, cls in ENTITIES:
        kb.entities[eid] = EntityRecord(eid, label, freq, cls)
    kb.triples = list(TRIPLES)
    kb.relation_labels = dict(RELATIONS)
    kb.validate()
    kb.rebuild_index()
    return kb


def build_toy_questions():
    classes = {eid: cls for eid, _, _, cls in ENTITIES}
    questions = []
    for idx, (text, golds) in enumerate(QUESTIONS):
        gold = []
        for eid, mention, is_main in golds:
            span = None
            if mention is not None:
                pos = text.find(mention)
                assert pos >= 0, (text, mention)
                span = (pos, pos + len(mention))
            gold.append(GoldEntity(eid, classes[eid], is_main, span))
        questions.append(AnnotatedQuestion("toy-%02d" % idx, text, gold))
    return questions


def write_toy_files(directory):
    """Write the fixture as the TSV/JSONL files the command line consumes."""
    import os

    from .data import save_questions

    os.makedirs(directory, exist_ok=True)
    paths = {
        "entities": os.path.join(directory, "entities.tsv"),
        "triples": os.path.join(directory, "triples.tsv"),
        "relations": os.path.join(directory, "relations.tsv"),
        "questions": os.path.join(directory, "questions.jsonl"),
    }
    with open(paths["entities"], "w", encoding="utf-8") as fh:
        for eid, label, freq, cls in ENTITIES:
            fh.write("%s\t%s\t%d\t%s\n" % (eid, label, freq, cls))
    with open(paths["triples"], "w", encoding="utf-8") as fh:
        for h, r, t in TRIPLES:
            fh.write("%s\t%s\t%s\n" % (h, r, t))
    with open(paths["relations"], "w", encoding="utf-8") as fh:
        for rid, label in RELATIONS:
            fh.write("%s\t%s\n" % (rid, label))
    save_questions(build_toy_questions(), paths["questions"])
    return paths
