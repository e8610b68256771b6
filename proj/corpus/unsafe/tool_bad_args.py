article = search_wikipedia(1234)
print(article)
